use std::path::Path;

use chrono::{Datelike, NaiveDate, Weekday};

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("autocall").chain(args.iter().copied());
    let code = autocall_cli::run(argv, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

fn data(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../data")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn ymd(y: i32, m: u32, d: u32) -> NaiveDate {
    NaiveDate::from_ymd_opt(y, m, d).unwrap()
}

/// Weekday closes over the reference note's observation period.
fn write_prices(dir: &Path, close: impl Fn(NaiveDate) -> f64) -> String {
    let mut csv = String::from("date,close\n");
    let mut d = ymd(2008, 2, 5);
    while d <= ymd(2009, 8, 5) {
        if !matches!(d.weekday(), Weekday::Sat | Weekday::Sun) {
            csv.push_str(&format!("{d},{:.2}\n", close(d)));
        }
        d = d.succ_opt().unwrap();
    }
    let path = dir.join("prices.csv");
    std::fs::write(&path, csv).unwrap();
    path.to_string_lossy().into_owned()
}

fn write_terms(dir: &Path, edit: impl Fn(String) -> String) -> String {
    let text = edit(std::fs::read_to_string(data("reference_note.terms")).unwrap());
    let path = dir.join("note.terms");
    std::fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn validate_reference_sheet() {
    let (code, out, _) = run(&["validate", "--terms", &data("reference_note.terms")]);
    assert_eq!(code, 0);
    assert!(out.contains("0.52, 1.04, 1.56, 2.08, 2.61, 3.13"), "{out}");
}

#[test]
fn validate_missing_maturity_names_key() {
    let dir = tempfile::tempdir().unwrap();
    let terms = write_terms(dir.path(), |t| {
        t.replace("maturity_date = 2009-08-10\n", "")
    });
    let (code, _, err) = run(&["validate", "--terms", &terms]);
    assert_eq!(code, 1);
    assert!(err.contains("maturity_date"), "{err}");
}

#[test]
fn validate_rate_mismatch_is_a_warning() {
    let dir = tempfile::tempdir().unwrap();
    let terms = write_terms(dir.path(), |t| t.replace("0.2084", "0.25"));
    let (code, _, err) = run(&["validate", "--terms", &terms]);
    assert_eq!(code, 0);
    assert!(err.starts_with("warning[observations]"), "{err}");
}

#[test]
fn missing_file_is_an_io_error() {
    let (code, _, err) = run(&["validate", "--terms", "/nonexistent/note.terms"]);
    assert_eq!(code, 2);
    assert!(err.contains("/nonexistent/note.terms"));
}

#[test]
fn replay_table_history() {
    let (code, out, _) = run(&[
        "replay",
        "--terms",
        &data("reference_note.terms"),
        "--prices",
        &data("financials_2008_2009.csv"),
    ]);
    assert_eq!(code, 0, "{out}");
    assert_eq!(
        out.matches("A: Securities NOT called | B: Securities NOT called")
            .count(),
        6
    );
    assert!(out.contains("[A]: $5.13 (total return of -48.7%, or a compound return of -35.9% per annum); trigger_loss"));
    assert!(out.contains("[B]: $5.13 (total return of -48.7%"));
    assert!(out.contains("First close below Trigger Level: 2009-02-05"));
}

#[test]
fn replay_flat_history_calls_at_first_observation() {
    let dir = tempfile::tempdir().unwrap();
    let prices = write_prices(dir.path(), |_| 369.44);
    let (code, out, _) = run(&[
        "replay",
        "--terms",
        &data("reference_note.terms"),
        "--prices",
        &prices,
        "--interpretation",
        "a",
    ]);
    assert_eq!(code, 0);
    assert!(out.contains("$10.52"), "{out}");
    assert!(out.contains("called(1)"));
}

#[test]
fn replay_breach_then_recovery_splits_interpretations() {
    let dir = tempfile::tempdir().unwrap();
    let start = 369.44;
    let prices = write_prices(dir.path(), |d| {
        if d == ymd(2008, 3, 3) {
            150.0
        } else if d == ymd(2009, 8, 5) {
            start * 1.05
        } else {
            300.0
        }
    });
    let terms = data("reference_note.terms");
    let (_, out_b, _) = run(&[
        "replay",
        "--terms",
        &terms,
        "--prices",
        &prices,
        "--interpretation",
        "b",
    ]);
    assert!(out_b.contains("$10.50"), "{out_b}");
    assert!(out_b.contains("post_breach_hold"));
    let (_, out_a, _) = run(&[
        "replay",
        "--terms",
        &terms,
        "--prices",
        &prices,
        "--interpretation",
        "a",
    ]);
    assert!(out_a.contains("$13.13"), "{out_a}");
    assert!(out_a.contains("called(6)"));
}

#[test]
fn replay_missing_observation_names_date() {
    let dir = tempfile::tempdir().unwrap();
    let prices = write_prices(dir.path(), |_| 300.0);
    let text = std::fs::read_to_string(&prices)
        .unwrap()
        .replace("2008-11-05,300.00\n", "");
    std::fs::write(&prices, text).unwrap();
    let (code, _, err) = run(&[
        "replay",
        "--terms",
        &data("reference_note.terms"),
        "--prices",
        &prices,
    ]);
    assert_eq!(code, 1);
    assert!(err.contains("2008-11-05"), "{err}");
}

#[test]
fn price_examples() {
    let cases: [(&[&str], &str); 3] = [
        (
            &["--mode", "iid", "--p", "0", "--b1", "0.7", "--b2", "0.8"],
            "-5.60",
        ),
        (&["--mode", "bound", "--p", "0", "--tau", "1"], "-5.00"),
        (
            &["--mode", "iid", "--p", "1", "--b1", "0.5", "--b2", "0.5"],
            "0.52",
        ),
    ];
    for (args, expected) in cases {
        let mut argv = vec!["price"];
        argv.extend_from_slice(args);
        let (code, out, _) = run(&argv);
        assert_eq!(code, 0);
        assert!(
            out.starts_with(&format!("expected net payment: {expected} ")),
            "{out}"
        );
    }
    let (code, _, _) = run(&["price", "--mode", "bound", "--p", "0.7", "--tau", "0.5"]);
    assert_eq!(code, 1);
}

#[test]
fn sweep_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("bound.csv");
    let out_str = out_path.to_string_lossy();
    let (code, _, _) = run(&[
        "sweep", "--mode", "iid", "--b1", "0.1", "--b2", "0.1", "--points", "101", "--out",
        &out_str,
    ]);
    assert_eq!(code, 0);
    let csv = std::fs::read_to_string(&out_path).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "p,expected_net_payment");
    assert_eq!(lines[1], "0.000000,-0.100000");
    assert_eq!(lines[101], "1.000000,0.520000");
    assert!(
        lines[102].starts_with("# max,0.290000,1.15"),
        "{}",
        lines[102]
    );

    let (code, _, err) = run(&[
        "sweep",
        "--mode",
        "surface",
        "--out",
        "/nonexistent/dir/x.csv",
    ]);
    assert_eq!(code, 2, "{err}");
}

#[test]
fn simulate_is_reproducible() {
    let model = data("models/lattice_small.model");
    let args = [
        "simulate", "--model", &model, "--paths", "20000", "--seed", "3",
    ];
    let (code, first, _) = run(&args);
    assert_eq!(code, 0);
    let (_, second, _) = run(&args);
    assert_eq!(first, second);
    let mut seq = args.to_vec();
    seq.push("--sequential");
    assert_eq!(run(&seq).1, first);
    assert!(first.contains("bound_dominates_exact"));
}

#[test]
fn simulate_requires_seed() {
    let (code, _, err) = run(&["simulate", "--model", &data("models/iid_optimistic.model")]);
    assert_eq!(code, 1);
    assert!(err.contains("--seed"));
}

#[test]
fn simulate_every_model_spec() {
    for name in [
        "iid_optimistic",
        "geometric_bear",
        "markov_momentum",
        "bootstrap_2008",
    ] {
        let (code, out, err) = run(&[
            "simulate",
            "--model",
            &data(&format!("models/{name}.model")),
            "--paths",
            "2000",
            "--seed",
            "1",
        ]);
        assert_eq!(code, 0, "{name}: {err}");
        assert!(out.contains("E[net A]"));
    }
}
