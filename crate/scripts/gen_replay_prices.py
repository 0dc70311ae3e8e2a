"""Writes data/financials_2008_2009.csv: synthetic weekday closes that hit the
published observation-date levels exactly."""

import csv
import datetime as dt
import math
import random
from pathlib import Path

START = 369.44
ANCHORS = [
    (dt.date(2008, 2, 5), START),
    (dt.date(2008, 5, 5), 365.48),
    (dt.date(2008, 8, 5), 302.05),
    (dt.date(2008, 11, 5), 201.77),
    (dt.date(2009, 2, 4), 192.40),
    (dt.date(2009, 2, 5), 121.51),
    (dt.date(2009, 5, 5), 155.52),
    (dt.date(2009, 8, 5), 189.37),
]
# Closes in this window must stay clear of the 184.72 trigger.
SAFE_UNTIL = dt.date(2009, 2, 4)
SAFE_FLOOR = 190.0


def weekdays(a, b):
    d = a
    while d <= b:
        if d.weekday() < 5:
            yield d
        d += dt.timedelta(days=1)


def main():
    rng = random.Random(20080205)
    rows = [(ANCHORS[0][0], ANCHORS[0][1])]
    for (d0, x0), (d1, x1) in zip(ANCHORS, ANCHORS[1:]):
        days = list(weekdays(d0, d1))
        n = len(days) - 1
        for i, d in enumerate(days[1:-1], start=1):
            t = i / n
            base = math.exp((1 - t) * math.log(x0) + t * math.log(x1))
            close = base * (1 + 0.012 * math.sin(math.pi * t) * rng.uniform(-1, 1))
            if d <= SAFE_UNTIL:
                close = max(close, SAFE_FLOOR)
            rows.append((d, round(close, 2)))
        rows.append((d1, x1))
    out = Path(__file__).resolve().parent.parent / "data" / "financials_2008_2009.csv"
    with out.open("w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["date", "close"])
        for d, c in rows:
            w.writerow([d.isoformat(), f"{c:.2f}"])


if __name__ == "__main__":
    main()
