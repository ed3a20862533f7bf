"""Shared constants and expensive session fixtures.

``TABLE1`` holds the published simulation-table (true value, proposed
estimator mean/sd at k=1000 and k=1500, naive mean/sd per configuration).
``table1_reports`` replicates all six configurations once per session at
desk scale (200 reps) and is shared by the acceptance gate and the
experiment-level band tests, which keeps the whole suite inside the
runtime budget.
"""

from __future__ import annotations

import pytest

from tailcovar import ExperimentConfig, Model1Spec, Model2Spec, run_table1

P = 0.05
N = 5000
REPS = 200
K_GRID = ((1000, 1000, 1000), (1500, 1500, 1500))

# Published per-configuration values: exact true CoVaR, proposed-estimator
# (mean, sd) per k, naive (mean, sd).
TABLE1 = {
    "m1_row1": {
        "model": ("model1", 0.85, 0.45),
        "true": 11.17,
        "k1000": (13.76, 1.88),
        "k1500": (14.30, 1.42),
        "naive": (18.26, 3.57),
    },
    "m1_row2": {
        "model": ("model1", 0.80, 0.42),
        "true": 9.52,
        "k1000": (11.64, 1.50),
        "k1500": (12.08, 1.12),
        "naive": (15.22, 2.80),
    },
    "m1_row3": {
        "model": ("model1", 0.75, 0.40),
        "true": 8.55,
        "k1000": (10.20, 1.23),
        "k1500": (10.55, 0.92),
        "naive": (13.06, 2.22),
    },
    "m2_row1": {
        "model": ("model2", 0.91),
        "true": 35.54,
        "k1000": (38.42, 11.29),
        "k1500": (40.21, 8.17),
        "naive": (40.49, 14.46),
    },
    "m2_row2": {
        "model": ("model2", 0.93),
        "true": 30.85,
        "k1000": (32.59, 9.34),
        "k1500": (33.74, 6.70),
        "naive": (35.30, 11.74),
    },
    "m2_row3": {
        "model": ("model2", 0.95),
        "true": 26.90,
        "k1000": (28.85, 8.16),
        "k1500": (29.03, 5.79),
        "naive": (31.10, 10.54),
    },
}

_ROW_SEEDS = {
    "m1_row1": 11000,
    "m1_row2": 12000,
    "m1_row3": 13000,
    "m2_row1": 21000,
    "m2_row2": 22000,
    "m2_row3": 23000,
}


def model_for(row_key: str):
    spec = TABLE1[row_key]["model"]
    if spec[0] == "model1":
        return Model1Spec(theta1=spec[1], theta2=spec[2])
    return Model2Spec(theta=spec[1])


def family_for(row_key: str) -> str:
    return "pareto_mixture" if row_key.startswith("m1") else "inverted_husler_reiss"


def row_config(row_key: str) -> ExperimentConfig:
    return ExperimentConfig(
        model=model_for(row_key),
        p=P,
        n=N,
        reps=REPS,
        k_grid=K_GRID,
        seed=_ROW_SEEDS[row_key],
        family_id=family_for(row_key),
    )


@pytest.fixture(scope="session")
def table1_reports():
    """Desk-scale replication of every published configuration (shared)."""
    return {key: run_table1(row_config(key)) for key in TABLE1}
