#!/usr/bin/env python3
"""Regenerates the synthetic fixtures under crates/core/tests/fixtures.

Desk-scale stand-ins for real competition data. Output is deterministic.
"""

import itertools
import math
from pathlib import Path

import numpy as np

SEED = 20240601
OUT = Path(__file__).resolve().parent.parent / "crates" / "core" / "tests" / "fixtures"

SIGHTED = {
    # label: (first year, years, asymptote in seconds, tau)
    "3": (2003, 20, 3.5, 15.0),
    "4": (2004, 19, 7.5, 19.0),
    "5": (2005, 18, 13.0, 21.0),
    "6": (2008, 15, 21.0, 23.0),
    "7": (2009, 14, 30.0, 25.0),
}
SIGHTED_R = 0.1

# Two learning phases joined at year 8.5: fast (r=0.3), then the sighted rate.
BLIND = {
    "3b": (2004, 18, 10.0),
    "4b": (2008, 14, 40.0),
    "5b": (2008, 13, 90.0),
}
BLIND_SWITCH = 8.5
BLIND_R1, BLIND_R2, BLIND_TAU2 = 0.3, 0.1, 20.0
BLIND_TAU1 = BLIND_SWITCH + BLIND_R2 * (BLIND_TAU2 - BLIND_SWITCH) / BLIND_R1

CODES = {"3": "333", "4": "444", "5": "555", "6": "666", "7": "777", "3b": "333bf", "4b": "444bf", "5b": "555bf"}


def progress_curve(t, a, r, tau):
    return a * (1.0 + math.exp(r * (tau - t)))


def sighted_curve(label, t):
    _, _, a, tau = SIGHTED[label]
    return progress_curve(t, a, SIGHTED_R, tau)


def blind_curve(label, t):
    a = BLIND[label][2]
    if t <= BLIND_SWITCH:
        return progress_curve(t, a, BLIND_R1, BLIND_TAU1)
    return progress_curve(t, a, BLIND_R2, BLIND_TAU2)


def write_series(path, rows):
    with open(path, "w") as f:
        f.write("label,T,y,kind\n")
        for label, t, y, kind in rows:
            f.write(f"{label},{t},{y:.4f},{kind}\n")


def progress_series(rng):
    rows = []
    for label, (_, years, _, _) in SIGHTED.items():
        for t in range(1, years + 1):
            y = sighted_curve(label, t) * (1.0 + 0.005 * rng.standard_normal())
            rows.append((label, t, y, "time"))
    for label, (_, years, _) in BLIND.items():
        for t in range(1, years + 1):
            sd = 0.08 if t <= 8 else 0.01
            y = blind_curve(label, t) * (1.0 + sd * rng.standard_normal())
            rows.append((label, t, y, "time"))
    return rows


def exponential_series(rng):
    rows = []
    for t in range(1, 16):
        rows.append(("3-moves", t, 60.0 * math.exp(-t / 5.0) * (1.0 + 0.03 * rng.standard_normal()), "moves"))
    for t in range(1, 21):
        rows.append(("3-time", t, 25.0 * math.exp(-t / 10.0) * (1.0 + 0.03 * rng.standard_normal()), "time"))
    return rows


# Who holds records in which events. Every sighted pair and every blindfold
# pair shares someone; three people cross over.
HOLDERS = {
    "2003ALPH01": ["3", "4", "5", "6", "7"],
    "2004BRAV01": ["3", "4", "5"],
    "2005CHAR01": ["5", "6", "7"],
    "2005DELT01": ["3", "6"],
    "2006ECHO01": ["4", "7"],
    "2006FOXT01": ["3", "7"],
    "2007GOLF01": ["4", "6"],
    "2007HOTE01": ["3", "5"],
    "2008INDI01": ["4", "5", "6", "7"],
    "2003JULI01": ["3"],
    "2004KILO01": ["4"],
    "2009LIMA01": ["7"],
    "2004MIKE01": ["3b", "4b", "5b"],
    "2005NOVE01": ["3b", "4b"],
    "2008OSCA01": ["4b", "5b"],
    "2008PAPA01": ["3b", "5b"],
    "2006QUEB01": ["3b"],
    "2009ROME01": ["5b"],
    "2006SIER01": ["3b", "3"],
    "2008TANG01": ["5b", "4"],
    "2009UNIF01": ["4b", "6"],
}


def records(rng):
    lines = []
    events = list(SIGHTED) + list(BLIND)
    for event in events:
        if event in SIGHTED:
            first, years = SIGHTED[event][:2]
            curve = sighted_curve
        else:
            first, years = BLIND[event][:2]
            curve = blind_curve
        holders = [p for p, evs in HOLDERS.items() if event in evs]
        cycle = itertools.cycle(holders)
        best = None
        for t in range(1, years + 1):
            target = curve(event, t)
            gap = target - curve(event, t + 1)
            m = int(rng.integers(1, 4))
            offsets = np.linspace(0.3 * gap, -0.3 * gap, m) if m > 1 else [0.0]
            year = first + t - 1
            for j, off in enumerate(offsets):
                value = int(round((target + off) * 100))
                if best is not None and value >= best:
                    value = best - 1
                best = value
                month = 1 + (12 * j) // m + int(rng.integers(0, 12 // m))
                day = int(rng.integers(1, 29))
                lines.append((next(cycle), CODES[event], f"{year}-{month:02d}-{day:02d}", value, "average"))
                # A slower result the same day, dropped by the record filter.
                if rng.random() < 0.3:
                    lines.append(("2010ZULU01", CODES[event], f"{year}-{month:02d}-{day:02d}", value + 150, "average"))
    # Sorted by date with a stable tie-break so the file reads chronologically.
    lines.sort(key=lambda r: r[2])
    return lines


def main():
    rng = np.random.default_rng(SEED)
    OUT.mkdir(parents=True, exist_ok=True)
    write_series(OUT / "series_progress.csv", progress_series(rng))
    write_series(OUT / "series_exponential.csv", exponential_series(rng))
    with open(OUT / "records.csv", "w") as f:
        f.write("person_id,event,date,value,kind\n")
        for row in records(rng):
            f.write(",".join(str(x) for x in row) + "\n")


if __name__ == "__main__":
    main()
