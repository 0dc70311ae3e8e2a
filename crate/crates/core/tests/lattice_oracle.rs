use autocall::montecarlo::{
    enumerate_exact, estimate_both, estimate_model_params, DailyLattice, MarketModel, McConfig,
};
use autocall::{Execution, Interpretation, NoteTerms};

const INSTANCES: [(f64, f64, f64, usize); 5] = [
    (1.05, 0.93, 0.45, 2),
    (1.1, 0.9, 0.5, 2),
    (1.2, 0.8, 0.5, 2),
    (1.3, 0.75, 0.5, 2),
    (1.15, 0.85, 0.4, 3),
];

/// Walks the lattice depth-first and settles each leaf straight from the
/// note's wording.
struct Dfs<'a> {
    m: &'a DailyLattice,
    coupons: Vec<f64>,
    obs_days: Vec<usize>,
    threshold: f64,
    net: [f64; 2],
    total: f64,
}

impl Dfs<'_> {
    fn walk(
        &mut self,
        day: usize,
        level: f64,
        min: f64,
        mins: &mut Vec<f64>,
        returns: &mut Vec<f64>,
        w: f64,
    ) {
        if w == 0.0 {
            return;
        }
        let steps = *self.obs_days.last().unwrap();
        if day == steps {
            self.leaf(mins, returns, w);
            return;
        }
        for (factor, prob) in [(self.m.up, self.m.q), (self.m.down, 1.0 - self.m.q)] {
            let next = level * factor;
            let d = next - 1.0;
            let nmin = min.min(d);
            let observed = self.obs_days.contains(&(day + 1));
            if observed {
                returns.push(d);
                mins.push(nmin);
            }
            self.walk(day + 1, next, nmin, mins, returns, w * prob);
            if observed {
                returns.pop();
                mins.pop();
            }
        }
    }

    fn leaf(&mut self, mins: &[f64], returns: &[f64], w: f64) {
        self.total += w;
        let last = *returns.last().unwrap();
        let n = returns.len();
        let net_a = match returns.iter().position(|&i| i >= 0.0) {
            Some(r) => self.coupons[r],
            None if mins[n - 1] < self.threshold => 10.0 * last,
            None => 0.0,
        };
        let mut net_b = if mins[n - 1] < self.threshold {
            10.0 * last
        } else {
            0.0
        };
        for r in 0..n {
            let clean_before = r == 0 || mins[r - 1] >= self.threshold;
            if clean_before && returns[r] >= 0.0 {
                net_b = self.coupons[r];
                break;
            }
            if mins[r] < self.threshold {
                net_b = 10.0 * last;
                break;
            }
        }
        self.net[0] += w * net_a;
        self.net[1] += w * net_b;
    }
}

fn dfs_oracle(m: &DailyLattice) -> ([f64; 2], f64) {
    let terms = NoteTerms::reference();
    let mut dfs = Dfs {
        m,
        coupons: vec![0.52, 1.04, 1.56, 2.08, 2.61, 3.13],
        obs_days: (1..=6).map(|r| r * m.days_per_quarter).collect(),
        threshold: terms.trigger_fraction - 1.0,
        net: [0.0; 2],
        total: 0.0,
    };
    dfs.walk(0, 1.0, f64::INFINITY, &mut Vec::new(), &mut Vec::new(), 1.0);
    (dfs.net, dfs.total)
}

#[test]
fn enumeration_matches_depth_first_oracle() {
    let terms = NoteTerms::reference();
    for (u, d, q, k) in INSTANCES
        .into_iter()
        .chain([(1.05, 0.95, 0.5, 2), (1.05, 0.93, 0.45, 3)])
    {
        let m = DailyLattice::new(u, d, q, k).unwrap();
        let exact = enumerate_exact(&m, &terms, Execution::Parallel).unwrap();
        let ([a, b], total) = dfs_oracle(&m);
        assert!((total - 1.0).abs() < 1e-12);
        assert!(
            (exact.expected_net_a - a).abs() < 1e-12,
            "{u} {d}: {} vs {a}",
            exact.expected_net_a
        );
        assert!(
            (exact.expected_net_b - b).abs() < 1e-12,
            "{u} {d}: {} vs {b}",
            exact.expected_net_b
        );
    }
}

#[test]
fn monte_carlo_within_three_standard_errors() {
    let terms = NoteTerms::reference();
    for (i, (u, d, q, k)) in INSTANCES.into_iter().enumerate() {
        let m = DailyLattice::new(u, d, q, k).unwrap();
        let exact = enumerate_exact(&m, &terms, Execution::Parallel).unwrap();
        let est = estimate_both(
            &MarketModel::DailyLattice(m),
            &terms,
            &McConfig::new(100_000, 100 + i as u64),
        )
        .unwrap();
        for (e, interp) in est.iter().zip(Interpretation::BOTH) {
            let target = exact.expected_net(interp);
            assert!(
                e.z_score(target) <= 3.0,
                "{u} {d} {interp}: {} +- {} vs {target}",
                e.mean,
                e.std_error
            );
        }
    }
}

#[test]
fn parameter_estimates_within_three_standard_errors() {
    let terms = NoteTerms::reference();
    let m = DailyLattice::new(1.2, 0.8, 0.5, 2).unwrap();
    let exact = enumerate_exact(&m, &terms, Execution::Parallel).unwrap();
    let est = estimate_model_params(
        &MarketModel::DailyLattice(m),
        &terms,
        &McConfig::new(200_000, 17),
    )
    .unwrap();
    let within = |x: f64, se: f64, target: f64| (x - target).abs() <= 3.0 * se;
    assert!(within(est.p.value, est.p.std_error, exact.p));
    assert!(within(est.tau.value, est.tau.std_error, exact.tau));
    assert!(within(est.b1.value, est.b1.std_error, exact.b1.unwrap()));
    assert!(within(est.b2.value, est.b2.std_error, exact.b2.unwrap()));
}
