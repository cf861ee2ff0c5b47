"""Seeded random inputs for the property and acceptance suites."""
from __future__ import annotations

import numpy as np

from .families import MetricFamily, generated_family
from .profiles import exp_decay, linear


def random_unitary(rng: np.random.Generator, n: int) -> np.ndarray:
    """Haar-ish unitary from the QR of a complex Gaussian, phases fixed."""
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    q, r = np.linalg.qr(g)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_exponents(rng: np.random.Generator, n: int, low=-3.0, high=3.0, min_gap=0.2) -> np.ndarray:
    """n ascending exponents in [low, high] separated by at least min_gap."""
    while True:
        exps = np.sort(rng.uniform(low, high, size=n))
        if n == 1 or np.min(np.diff(exps)) >= min_gap:
            return exps


def random_generated_family(
    rng: np.random.Generator,
    n: int,
    t_max: float = 200.0,
    low: float = -3.0,
    high: float = 3.0,
    min_gap: float = 0.2,
    perturb: bool = True,
) -> MetricFamily:
    """Rotated diagonal family with convex catalog perturbations."""
    u = random_unitary(rng, n)
    exps = random_exponents(rng, n, low, high, min_gap)
    profiles = []
    for a in exps:
        intercept = rng.uniform(-0.5, 0.5)
        if perturb and rng.random() < 0.8:
            profiles.append(
                exp_decay(a, intercept, amp=rng.uniform(0.0, 1.0), rate=rng.uniform(0.5, 2.0))
            )
        else:
            profiles.append(linear(a, intercept))
    return generated_family([(u, profiles)], t_max=t_max, require_unitary=True)


def random_vector(rng: np.random.Generator, n: int) -> np.ndarray:
    return rng.standard_normal(n) + 1j * rng.standard_normal(n)
