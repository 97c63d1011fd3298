import itertools

import numpy as np
import pytest

from resq import FormFactor, ModelConfig


def matched_distance(left, right):
    """Smallest worst-case pairing distance between two eigenvalue sets."""
    left = list(left)
    best = None
    for perm in itertools.permutations(right):
        worst = max(abs(a - b) for a, b in zip(left, perm))
        best = worst if best is None else min(best, worst)
    return best

OHMIC = FormFactor(-0.5, 1, 1.0)
OHMIC_GAUSS = FormFactor(-0.5, 2, 1.0)
SUPRA = FormFactor(0.5, 1, 1.0)


def random_config(rng, kappa=0.1, s10=True, decay=1):
    """Random admissible configuration with max coupling magnitude <= kappa."""
    while True:
        b1 = rng.uniform(0.4, 0.9)
        b2 = rng.uniform(1.2, 2.2)
        if abs(b2 / b1 - 2.0) > 0.1:
            break
    beta = rng.uniform(0.5, 1.6)
    # keep exchange couplings bounded away from zero so all rates are positive
    signs = rng.choice([-1.0, 1.0], size=8)
    mags = np.concatenate([rng.uniform(0.4, 1.0, size=4), rng.uniform(0.0, 1.0, size=4)])
    lam1, lam2, mu1, mu2, kap1, kap2, nu1, nu2 = signs * mags * kappa
    g = FormFactor(-0.5, decay, rng.uniform(0.5, 2.0))
    f = FormFactor(-0.5, decay, rng.uniform(0.5, 2.0))
    kwargs = {}
    if not s10:
        kwargs = dict(
            g1=FormFactor(0.5, decay, rng.uniform(0.5, 2.0)),
            g2=FormFactor(-0.5, decay, rng.uniform(0.5, 2.0)),
            f1=FormFactor(0.5, decay, rng.uniform(0.5, 2.0)),
            f2=FormFactor(-0.5, decay, rng.uniform(0.5, 2.0)),
        )
    return ModelConfig(
        B1=b1,
        B2=b2,
        beta=beta,
        lambda1=lam1,
        lambda2=lam2,
        kappa1=kap1,
        kappa2=kap2,
        mu1=mu1,
        mu2=mu2,
        nu1=nu1,
        nu2=nu2,
        g=g,
        f=f,
        **kwargs,
    )


def scaled_config(rng, kappa):
    """Random configuration rescaled so the max coupling equals kappa exactly."""
    cfg = random_config(rng, kappa=1.0)
    scale = kappa / cfg.varkappa
    return ModelConfig(
        B1=cfg.B1,
        B2=cfg.B2,
        beta=cfg.beta,
        lambda1=cfg.lambda1 * scale,
        lambda2=cfg.lambda2 * scale,
        kappa1=cfg.kappa1 * scale,
        kappa2=cfg.kappa2 * scale,
        mu1=cfg.mu1 * scale,
        mu2=cfg.mu2 * scale,
        nu1=cfg.nu1 * scale,
        nu2=cfg.nu2 * scale,
        g=cfg.g,
        f=cfg.f,
    )


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


@pytest.fixture
def base_cfg():
    """Well-scaled reference configuration used across the dynamic tests."""
    return ModelConfig(
        B1=0.6,
        B2=1.5,
        beta=1.0,
        lambda1=0.02,
        lambda2=-0.03,
        kappa1=0.04,
        kappa2=0.02,
        mu1=0.01,
        mu2=0.05,
        nu1=0.03,
        nu2=-0.02,
        g=OHMIC,
        f=OHMIC,
    )


def random_density_matrix(rng):
    """Random full-rank physical state from a Ginibre draw."""
    a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    m = a @ a.conj().T
    return m / np.trace(m)
