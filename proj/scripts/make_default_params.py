#!/usr/bin/env python3
"""Regenerates data/aaa_default_params.json, the illustrative parameter set.

The values are synthetic but shaped like the clinical literature: rupture
risk rises steeply with diameter (with a marked jump above 55 mm),
background and surgical mortality rise exponentially with age, emergency
repair is far deadlier than elective repair, and the annual QALY weight
declines slowly with age.
"""

import json
import math
import pathlib

START_AGE = 65
MAX_AGE = 120

BINS = [
    "<30 mm", "30-35 mm", "35-40 mm", "40-45 mm", "45-50 mm", "50-55 mm",
    "55-60 mm", "60-65 mm", "65-70 mm", "70-75 mm", "75-80 mm", ">80 mm",
]

# Annual rupture probability per bin, increasing in diameter.
RUPTURE = [0.001, 0.002, 0.004, 0.007, 0.012, 0.02,
           0.09, 0.13, 0.17, 0.22, 0.28, 0.35]

# Annual growth: mostly stay, one bin up with probability a, two bins up
# with a small tail e; growth accelerates with diameter. No shrinkage.
GROW_UP = [0.05, 0.07, 0.09, 0.11, 0.13, 0.15, 0.17, 0.19, 0.21, 0.23, 0.25]
SKIP_FRACTION = 0.25


def growth_rows():
    rows = {}
    for b, label in enumerate(BINS):
        row = {}
        if b == len(BINS) - 1:
            row[label] = 1.0
        elif b == len(BINS) - 2:
            up = round(GROW_UP[b], 4)
            row[label] = 1.0 - up
            row[BINS[b + 1]] = up
        else:
            up = round(GROW_UP[b], 4)
            skip = round(GROW_UP[b] * SKIP_FRACTION, 4)
            row[label] = 1.0 - up - skip
            row[BINS[b + 1]] = up
            row[BINS[b + 2]] = skip
        rows[label] = row
    return rows


def capped_exponential(base, rate, cap):
    def curve(age):
        return round(min(base * math.exp(rate * (age - START_AGE)), cap), 6)
    return curve


def main():
    qaly = lambda age: round(0.85 - 0.005 * (age - START_AGE), 6)
    background = capped_exponential(0.01, 0.085, 0.65)
    elective = capped_exponential(0.05, 0.075, 0.9)
    emergency = capped_exponential(0.35, 0.02, 0.95)

    params = {
        "schema_version": 1,
        "description": "illustrative synthetic parameter set",
        "horizon": {"start_age": START_AGE, "max_age": MAX_AGE},
        "reach_hospital_prob": 0.5,
        "rupture_prob": dict(zip(BINS, RUPTURE)),
        "growth": growth_rows(),
        "qaly_weight": {str(a): qaly(a) for a in range(START_AGE, MAX_AGE + 1)},
        "background_mortality": {str(a): background(a) for a in range(START_AGE, MAX_AGE)},
        "elective_mortality": {str(a): elective(a) for a in range(START_AGE, MAX_AGE)},
        "emergency_mortality": {str(a): emergency(a) for a in range(START_AGE, MAX_AGE)},
    }

    out = pathlib.Path(__file__).resolve().parent.parent / "data" / "aaa_default_params.json"
    out.write_text(json.dumps(params, indent=2) + "\n")
    print(f"wrote {out}")


if __name__ == "__main__":
    main()
