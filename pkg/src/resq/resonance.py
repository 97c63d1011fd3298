"""Level-shift operators, resonance data, decoherence rates, Davies generator.

The two-qubit Hamiltonian B1*Sz1 + B2*Sz2 has the ordered energy basis
``|++>, |+->, |-+>, |-->``.  Its Liouvillian eigenvalues (Bohr energies)
are 0, 2*B1, 2*B2, 2*(B2-B1), 2*(B1+B2) and their negatives; each carries
a level-shift operator whose eigenvalues are the second-order complex
energy corrections driving the reduced dynamics.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import eig
from .errors import (
    ConfigError,
    DegeneracyError,
    NumericError,
    PreconditionError,
    WeakCouplingWarning,
)
from .spectral import FormFactor, pv_r, pv_rg, quad_rtol, r_prime, sigma, sigma_pm

_DEGENERACY_RTOL = 1e-10
_BIORTH_TOL = 1e-8


@dataclass(frozen=True)
class ModelConfig:
    """Full physical parameterization of the two qubits and three reservoirs.

    ``lambda1/lambda2`` couple both spins to the collective reservoir via
    spin flips, ``kappa1/kappa2`` via energy-conserving Sz terms;
    ``mu_j`` and ``nu_j`` are the corresponding local couplings.  Each
    coupling channel carries a form factor: ``g``/``f`` collective
    (exchange/conserving), ``g1, g2, f1, f2`` local.
    """

    B1: float
    B2: float
    beta: float
    lambda1: float = 0.0
    lambda2: float = 0.0
    kappa1: float = 0.0
    kappa2: float = 0.0
    mu1: float = 0.0
    mu2: float = 0.0
    nu1: float = 0.0
    nu2: float = 0.0
    g: FormFactor = FormFactor(-0.5, 2, 1.0)
    f: FormFactor = FormFactor(-0.5, 2, 1.0)
    g1: FormFactor | None = None
    g2: FormFactor | None = None
    f1: FormFactor | None = None
    f2: FormFactor | None = None

    def __post_init__(self):
        if not 0.0 < self.B1 < self.B2:
            raise ConfigError(f"need 0 < B1 < B2, got B1={self.B1}, B2={self.B2}")
        if abs(self.B2 / self.B1 - 2.0) <= 2.0 * 1e-9:
            raise ConfigError(
                "non-degeneracy violated: B2/B1 within 1e-9 of 2 "
                f"(B1={self.B1}, B2={self.B2})"
            )
        if not self.beta > 0.0:
            raise ConfigError(f"beta must be positive, got {self.beta}")
        for name in ("lambda1", "lambda2", "kappa1", "kappa2", "mu1", "mu2", "nu1", "nu2"):
            if not math.isfinite(getattr(self, name)):
                raise ConfigError(f"coupling {name} is not finite")
        for name in ("g1", "g2", "f1", "f2"):
            if getattr(self, name) is None:
                base = self.g if name.startswith("g") else self.f
                object.__setattr__(self, name, base)

    @property
    def varkappa(self) -> float:
        """Overall coupling size: max absolute coupling constant."""
        return max(
            abs(c)
            for c in (
                self.kappa1,
                self.kappa2,
                self.lambda1,
                self.lambda2,
                self.mu1,
                self.mu2,
                self.nu1,
                self.nu2,
            )
        )

    @property
    def s10_prime(self) -> bool:
        """True when local and collective channels share form factors."""
        return self.g1 == self.g and self.g2 == self.g and self.f1 == self.f and self.f2 == self.f

    def energies(self) -> np.ndarray:
        """System energies E1..E4 in the ordered basis."""
        return np.array(
            [self.B1 + self.B2, self.B1 - self.B2, -self.B1 + self.B2, -self.B1 - self.B2]
        )

    def partition_function(self) -> float:
        return float(np.exp(-self.beta * self.energies()).sum())

    def gibbs_populations(self) -> np.ndarray:
        weights = np.exp(-self.beta * self.energies())
        return weights / weights.sum()


@dataclass(frozen=True)
class BohrEnergy:
    """One nonnegative Liouvillian eigenvalue with its index and multiplicity."""

    index: int
    value: float
    multiplicity: int


def bohr_energies(cfg: ModelConfig) -> list[BohrEnergy]:
    """The five nonnegative Bohr energies e1..e5 of the model."""
    b1, b2 = cfg.B1, cfg.B2
    return [
        BohrEnergy(1, 0.0, 4),
        BohrEnergy(2, 2.0 * b1, 2),
        BohrEnergy(3, 2.0 * b2, 2),
        BohrEnergy(4, 2.0 * (b2 - b1), 1),
        BohrEnergy(5, 2.0 * (b1 + b2), 1),
    ]


# basis pairs (k, l), 1-based, spanning each positive-energy eigenspace;
# pair (k, l) stands for the Liouville basis vector Phi_k (x) Phi_l
_LSO_PAIRS = {
    1: ((1, 1), (2, 2), (3, 3), (4, 4)),
    2: ((1, 3), (2, 4)),
    3: ((1, 2), (3, 4)),
    4: ((3, 2),),
    5: ((1, 4),),
}


@dataclass(frozen=True)
class LevelShiftOperator:
    """Second-order effective operator on one Liouvillian eigenspace."""

    energy: BohrEnergy
    pairs: tuple[tuple[int, int], ...]
    matrix: np.ndarray


@dataclass(frozen=True)
class ResonanceDatum:
    """One resonance branch: complex correction and biorthonormal vectors."""

    energy: BohrEnergy
    branch: int
    delta: complex
    eta: np.ndarray
    eta_tilde: np.ndarray


def _exchange_weights(cfg: ModelConfig):
    """Per-spin emission weights and their asymptotic pieces."""
    a1 = (
        cfg.mu1**2 * sigma_pm(cfg.g1, cfg.B1, cfg.beta, -1).value
        + cfg.lambda1**2 * sigma_pm(cfg.g, cfg.B1, cfg.beta, -1).value
    )
    a2 = (
        cfg.mu2**2 * sigma_pm(cfg.g2, cfg.B2, cfg.beta, -1).value
        + cfg.lambda2**2 * sigma_pm(cfg.g, cfg.B2, cfg.beta, -1).value
    )
    return a1, a2


def build_level_shift(cfg: ModelConfig, e: BohrEnergy) -> LevelShiftOperator:
    """Assemble the level-shift operator at a nonnegative Bohr energy.

    The population operator (e = 0) is a sum of two single-spin blocks and
    is independent of the energy-conserving couplings.  The coherence
    operators pick up, in addition, dephasing weights at zero frequency,
    principal-value Lamb shifts, and (for the one-quantum coherences) a
    real cross term from the collective conserving channel.
    """
    beta = cfg.beta
    e1 = math.exp(2.0 * beta * cfg.B1)
    e2 = math.exp(2.0 * beta * cfg.B2)
    a1, a2 = _exchange_weights(cfg)

    if e.index == 1:
        m_spin1 = np.array(
            [[e1, 0, -e1, 0], [0, e1, 0, -e1], [-1, 0, 1, 0], [0, -1, 0, 1]], dtype=complex
        )
        m_spin2 = np.array(
            [[e2, -e2, 0, 0], [-1, 1, 0, 0], [0, 0, e2, -e2], [0, 0, -1, 1]], dtype=complex
        )
        matrix = 1j * (a1 * m_spin1 + a2 * m_spin2)
        return LevelShiftOperator(e, _LSO_PAIRS[1], matrix)

    sf0 = sigma(cfg.f, 0.0, beta).value
    sf10 = sigma(cfg.f1, 0.0, beta).value
    sf20 = sigma(cfg.f2, 0.0, beta).value

    if e.index in (2, 3):
        r_cross = pv_r(cfg.f).value
        if e.index == 2:
            # spin-1 coherences: scalar part from spin 1, matrix part from spin 2
            scalar = (
                1j * a1 * 0.5 * (1.0 + e1)
                - (cfg.mu1**2 * pv_rg(cfg.g1, cfg.B1, beta).value
                   + cfg.lambda1**2 * pv_rg(cfg.g, cfg.B1, beta).value)
                + 1j * (cfg.kappa1**2 * sf0 + cfg.nu1**2 * sf10)
            )
            b_coef, e_other = a2, e2
        else:
            scalar = (
                1j * a2 * 0.5 * (1.0 + e2)
                - (cfg.mu2**2 * pv_rg(cfg.g2, cfg.B2, beta).value
                   + cfg.lambda2**2 * pv_rg(cfg.g, cfg.B2, beta).value)
                + 1j * (cfg.kappa2**2 * sf0 + cfg.nu2**2 * sf20)
            )
            b_coef, e_other = a1, e1
        c_cross = -2.0 * cfg.kappa1 * cfg.kappa2 * r_cross
        matrix = scalar * np.eye(2, dtype=complex) + 1j * b_coef * np.array(
            [[e_other, -e_other], [-1.0, 1.0]], dtype=complex
        )
        matrix += c_cross * np.diag([1.0, -1.0]).astype(complex)
        return LevelShiftOperator(e, _LSO_PAIRS[e.index], matrix)

    # scalar coherences (2,3) and (1,4)
    imag_common = (
        cfg.mu1**2 * sigma(cfg.g1, cfg.B1, beta).value
        + cfg.lambda1**2 * sigma(cfg.g, cfg.B1, beta).value
        + cfg.mu2**2 * sigma(cfg.g2, cfg.B2, beta).value
        + cfg.lambda2**2 * sigma(cfg.g, cfg.B2, beta).value
        + cfg.nu1**2 * sf10
        + cfg.nu2**2 * sf20
    )
    shift1 = cfg.mu1**2 * pv_rg(cfg.g1, cfg.B1, beta).value + cfg.lambda1**2 * pv_rg(
        cfg.g, cfg.B1, beta
    ).value
    shift2 = cfg.mu2**2 * pv_rg(cfg.g2, cfg.B2, beta).value + cfg.lambda2**2 * pv_rg(
        cfg.g, cfg.B2, beta
    ).value
    if e.index == 4:
        value = 1j * (imag_common + (cfg.kappa1 - cfg.kappa2) ** 2 * sf0) + shift1 - shift2
    elif e.index == 5:
        value = 1j * (imag_common + (cfg.kappa1 + cfg.kappa2) ** 2 * sf0) - shift1 - shift2
    else:
        raise NumericError(f"unknown Bohr energy index {e.index}")
    return LevelShiftOperator(e, _LSO_PAIRS[e.index], np.array([[value]], dtype=complex))


def _principal_sqrt(z: complex) -> complex:
    # branch cut on the negative reals; on the cut take the limit from above
    if z.imag == 0.0:
        z = complex(z.real, 0.0)
    return complex(np.sqrt(complex(z)))


def _check_distinct(deltas, energy: BohrEnergy):
    scale = max(abs(d) for d in deltas)
    if scale == 0.0:
        raise DegeneracyError(
            f"all resonance corrections vanish at Bohr energy e{energy.index}",
            branches=tuple(range(1, len(deltas) + 1)),
        )
    for i in range(len(deltas)):
        for j in range(i + 1, len(deltas)):
            if abs(deltas[i] - deltas[j]) <= _DEGENERACY_RTOL * scale:
                raise DegeneracyError(
                    f"resonance branches {i + 1} and {j + 1} collide at Bohr energy "
                    f"e{energy.index}: {deltas[i]} vs {deltas[j]}",
                    branches=(i + 1, j + 1),
                )


def _validate_data(data: list[ResonanceDatum], energy: BohrEnergy):
    gram = np.array(
        [[np.vdot(d_l.eta_tilde, d_r.eta) for d_r in data] for d_l in data]
    )
    err = float(np.abs(gram - np.eye(len(data))).max())
    if err > _BIORTH_TOL:
        raise NumericError(
            f"biorthonormality failed at Bohr energy e{energy.index}: max error {err:.2e}"
        )
    for d in data:
        if d.delta.imag < -1e-12:
            raise NumericError(
                f"resonance correction with negative imaginary part at e{energy.index} "
                f"branch {d.branch}: {d.delta}"
            )


def _zero_energy_closed_form(cfg: ModelConfig, e: BohrEnergy) -> list[ResonanceDatum]:
    beta = cfg.beta
    e1 = math.exp(2.0 * beta * cfg.B1)
    e2 = math.exp(2.0 * beta * cfg.B2)
    z = cfg.partition_function()
    a1, a2 = _exchange_weights(cfg)
    d2 = 1j * a2 * (1.0 + e2)
    d3 = 1j * a1 * (1.0 + e1)
    deltas = [0.0j, d2, d3, d2 + d3]
    etas = [
        np.array([1.0, 1.0, 1.0, 1.0], dtype=complex),
        np.array([-e2, 1.0, -e2, 1.0], dtype=complex),
        np.array([-e1, -e1, 1.0, 1.0], dtype=complex),
        np.array([e1 * e2, -e1, -e2, 1.0], dtype=complex),
    ]
    eta_tildes = [
        np.array(
            [1.0 / math.sqrt(e1 * e2), math.sqrt(e2 / e1), math.sqrt(e1 / e2), math.sqrt(e1 * e2)],
            dtype=complex,
        )
        / z,
        math.sqrt(e1 / e2) * np.array([-1.0 / e1, 1.0 / e1, -1.0, 1.0], dtype=complex) / z,
        math.sqrt(e2 / e1) * np.array([-1.0 / e2, -1.0, 1.0 / e2, 1.0], dtype=complex) / z,
        np.array([1.0, -1.0, -1.0, 1.0], dtype=complex) / (z * math.sqrt(e1 * e2)),
    ]
    return [
        ResonanceDatum(e, s + 1, complex(deltas[s]), etas[s], eta_tildes[s]) for s in range(4)
    ]


def _one_quantum_closed_form(cfg: ModelConfig, e: BohrEnergy, lso: LevelShiftOperator):
    """Eigendata of the 2x2 coherence operator in closed form.

    The matrix is ``A*I + [[eo*B + C, -eo*B], [-B, B - C]]`` with B purely
    imaginary and C real; its two branches split by the principal square
    root of the discriminant.
    """
    beta = cfg.beta
    a1, a2 = _exchange_weights(cfg)
    if e.index == 2:
        b = 1j * a2
        eo = math.exp(2.0 * beta * cfg.B2)
    else:
        b = 1j * a1
        eo = math.exp(2.0 * beta * cfg.B1)
    c = -2.0 * cfg.kappa1 * cfg.kappa2 * pv_r(cfg.f).value
    a_scalar = lso.matrix[1, 1] - b + c  # recover A = M22 - B + C

    disc = b * b * (1.0 + eo) ** 2 + 4.0 * c * (b * (eo - 1.0) + c)
    root = _principal_sqrt(disc)
    deltas = [
        a_scalar + 0.5 * b * (1.0 + eo) + 0.5 * root,
        a_scalar + 0.5 * b * (1.0 + eo) - 0.5 * root,
    ]
    _check_distinct(deltas, e)
    data = []
    for s, dd in enumerate(deltas):
        # null vectors of M - delta*I from its adjugate; of the two
        # algebraically equivalent columns, the larger-norm one avoids the
        # cancellation that hits the textbook ratio formula when |B| << |C|
        shifted = lso.matrix - dd * np.eye(2)
        eta = _stable_null_2x2(shifted)
        eta_tilde = _stable_null_2x2(shifted.conj().T)
        overlap = np.vdot(eta_tilde, eta)
        if abs(overlap) < 1e-12 * float(np.linalg.norm(eta) * np.linalg.norm(eta_tilde)):
            raise NumericError(
                f"left/right resonance vectors nearly orthogonal at e{e.index} branch {s + 1}"
            )
        eta_tilde = eta_tilde / np.conj(overlap)
        data.append(ResonanceDatum(e, s + 1, complex(dd), eta, eta_tilde))
    return data


def _stable_null_2x2(b: np.ndarray) -> np.ndarray:
    cols = (
        np.array([b[1, 1], -b[1, 0]], dtype=complex),
        np.array([-b[0, 1], b[0, 0]], dtype=complex),
    )
    vec = max(cols, key=np.linalg.norm)
    norm = np.linalg.norm(vec)
    if norm == 0.0:
        raise DegeneracyError("coherence operator is a multiple of the identity")
    vec = vec / norm
    # present with unit first component (the conventional closed form)
    # when that does not amplify rounding
    if abs(vec[0]) > 1e-3:
        vec = vec / vec[0]
    return vec


def _order_zero_branches(cfg: ModelConfig, triples):
    """Order generic e=0 eigendata to the closed-form branch convention."""
    e1 = math.exp(2.0 * cfg.beta * cfg.B1)
    e2 = math.exp(2.0 * cfg.beta * cfg.B2)
    patterns = [
        np.array([1.0, 1.0, 1.0, 1.0]),
        np.array([-e2, 1.0, -e2, 1.0]),
        np.array([-e1, -e1, 1.0, 1.0]),
        np.array([e1 * e2, -e1, -e2, 1.0]),
    ]
    ordered = [None] * 4
    taken = set()
    for pat in patterns:
        pat = pat / np.linalg.norm(pat)
        best, best_overlap = None, -1.0
        for idx, (lam, right, left) in enumerate(triples):
            if idx in taken:
                continue
            overlap = abs(np.vdot(pat, right)) / np.linalg.norm(right)
            if overlap > best_overlap:
                best, best_overlap = idx, overlap
        taken.add(best)
        ordered[len(taken) - 1] = triples[best]
    return ordered


def _order_pm_branches(triples):
    """Label 2x2 eigendata so branch 1 carries the principal-root (+) sign."""
    (l1, r1, t1), (l2, r2, t2) = triples
    mean = 0.5 * (l1 + l2)
    d = l1 - mean
    scale = max(abs(l1), abs(l2), 1e-300)
    if d.real > 1e-14 * scale or (abs(d.real) <= 1e-14 * scale and d.imag >= 0.0):
        return [(l1, r1, t1), (l2, r2, t2)]
    return [(l2, r2, t2), (l1, r1, t1)]


def resonance_data(cfg: ModelConfig, e: BohrEnergy) -> list[ResonanceDatum]:
    """Resonance branches (delta, eta, eta_tilde) at a nonnegative Bohr energy.

    Closed forms are used whenever the form factors satisfy the shared-
    channel condition (g1 = g2 = g, f1 = f2 = f); otherwise the generic
    eigensolver runs on the assembled level-shift matrix.  Branch ordering
    follows the closed-form conventions in both modes.  Eigenvalue
    collisions raise ``DegeneracyError`` naming the branches.
    """
    lso = build_level_shift(cfg, e)
    if e.multiplicity == 1:
        value = complex(lso.matrix[0, 0])
        vec = np.array([1.0], dtype=complex)
        data = [ResonanceDatum(e, 1, value, vec, vec.copy())]
        _validate_data(data, e)
        return data

    if not lso.matrix.any():
        # identically zero operator (e.g. no energy-exchange couplings at
        # e = 0): the standard basis is exact eigendata and the propagator
        # is unambiguous even though the branches are degenerate
        dim = e.multiplicity
        data = []
        for s in range(dim):
            vec = np.zeros(dim, dtype=complex)
            vec[s] = 1.0
            data.append(ResonanceDatum(e, s + 1, 0.0j, vec, vec.copy()))
        return data

    if cfg.s10_prime:
        if e.index == 1:
            data = _zero_energy_closed_form(cfg, e)
        else:
            data = _one_quantum_closed_form(cfg, e, lso)
        _check_distinct([d.delta for d in data], e)
        _validate_data(data, e)
        return data

    triples = eig.eig_pairs(lso.matrix)
    _check_distinct([t[0] for t in triples], e)
    if e.index == 1:
        triples = _order_zero_branches(cfg, triples)
        # pin the equilibrium branch to an exact zero eigenvalue
        lam0 = triples[0][0]
        scale = max(abs(t[0]) for t in triples)
        if abs(lam0) > 1e-10 * scale:
            raise NumericError(f"no zero resonance found at e=0 (smallest {lam0})")
        triples[0] = (0.0j, triples[0][1], triples[0][2])
    else:
        triples = _order_pm_branches(triples)
    data = [
        ResonanceDatum(e, s + 1, complex(lam), right, left)
        for s, (lam, right, left) in enumerate(triples)
    ]
    _validate_data(data, e)
    return data


def check_weak_coupling(cfg: ModelConfig):
    """Warn when the dropped fourth-order terms plausibly matter."""
    min_pop = float(cfg.gibbs_populations().min())
    if cfg.varkappa**2 > 0.1 * min_pop:
        warnings.warn(
            f"coupling varkappa={cfg.varkappa:.3g} has varkappa^2 > 0.1 * min Gibbs "
            f"population ({min_pop:.3g}); second-order resonance data may be inaccurate",
            WeakCouplingWarning,
            stacklevel=3,
        )


class ResonanceTable:
    """Resonance data for all nine signed Bohr energies of one configuration.

    Negative-energy data follow from the positive-energy blocks by the
    mirror rule: transpose the basis pairs, negate and conjugate the
    eigenvalue, conjugate the vectors.
    """

    def __init__(self, cfg: ModelConfig):
        check_weak_coupling(cfg)
        self.cfg = cfg
        self.energies = bohr_energies(cfg)
        self._data = {e.index: resonance_data(cfg, e) for e in self.energies}

    def data(self, index: int, sign: int = +1) -> list[ResonanceDatum]:
        base = self._data[index]
        if sign >= 0 or index == 1:
            return base
        mirrored = []
        for d in base:
            mirrored.append(
                ResonanceDatum(
                    d.energy,
                    d.branch,
                    -np.conj(d.delta),
                    np.conj(d.eta),
                    np.conj(d.eta_tilde),
                )
            )
        return mirrored

    def pairs(self, index: int, sign: int = +1) -> tuple[tuple[int, int], ...]:
        base = _LSO_PAIRS[index]
        if sign >= 0 or index == 1:
            return base
        return tuple((l, k) for (k, l) in base)

    def signed_energy(self, index: int, sign: int = +1) -> float:
        value = self._data[index][0].energy.value
        return value if sign >= 0 else -value

    def matrix(self, index: int, sign: int = +1) -> np.ndarray:
        """Level-shift matrix at a signed Bohr energy, in ``pairs`` order."""
        lso = build_level_shift(self.cfg, self.energies[index - 1])
        if sign >= 0 or index == 1:
            return lso.matrix
        return -np.conj(lso.matrix)


@lru_cache(maxsize=64)
def _cached_table(cfg: ModelConfig, _rtol: float) -> ResonanceTable:
    return ResonanceTable(cfg)


def resonance_table(cfg: ModelConfig) -> ResonanceTable:
    """Memoized resonance table for a configuration."""
    return _cached_table(cfg, quad_rtol())


@dataclass(frozen=True)
class RateReport:
    """Second-order thermalization/decoherence rates and decay constants."""

    gamma_th: float
    gamma_dec_2: float
    gamma_dec_3: float
    gamma_dec_4: float
    gamma_dec_5: float
    Y2: float
    Y3: float
    delta2: float
    delta3: float
    delta4: float
    delta5: float
    delta_plus: float
    delta_minus: float


def rates(cfg: ModelConfig) -> RateReport:
    """Evaluate the closed-form rate formulas (fourth-order terms dropped).

    Requires shared form factors across local and collective channels.
    ``delta2``/``delta3`` are the single-spin thermalization rates of
    spins 1 and 2; ``delta5`` the decay rate of the two-quantum coherence.
    Raises ``NumericError`` if any rate comes out below -1e-10.
    """
    if not cfg.s10_prime:
        raise PreconditionError(
            "rates() requires shared form factors (g1 = g2 = g and f1 = f2 = f)"
        )
    s_g1 = sigma(cfg.g, cfg.B1, cfg.beta).value
    s_g2 = sigma(cfg.g, cfg.B2, cfg.beta).value
    s_f0 = sigma(cfg.f, 0.0, cfg.beta).value
    w1 = cfg.lambda1**2 + cfg.mu1**2
    w2 = cfg.lambda2**2 + cfg.mu2**2
    delta2 = w1 * s_g1
    delta3 = w2 * s_g2
    r_val = pv_r(cfg.f).value
    rp1 = r_prime(cfg.g, cfg.B1).value
    rp2 = r_prime(cfg.g, cfg.B2).value
    kk = cfg.kappa1 * cfg.kappa2

    y2 = abs(
        _principal_sqrt(
            4.0 * kk**2 * r_val**2
            - 0.25 * (w2 * s_g2) ** 2
            - 2.0j * kk * w2 * r_val * rp2
        ).imag
    )
    y3 = abs(
        _principal_sqrt(
            4.0 * kk**2 * r_val**2
            - 0.25 * (w1 * s_g1) ** 2
            - 2.0j * kk * w1 * r_val * rp1
        ).imag
    )

    gamma_th = min(delta2, delta3)
    gamma_2 = 0.5 * delta2 + 0.5 * delta3 - y2 + (cfg.kappa1**2 + cfg.nu1**2) * s_f0
    gamma_3 = 0.5 * delta2 + 0.5 * delta3 - y3 + (cfg.kappa2**2 + cfg.nu2**2) * s_f0
    gamma_4 = delta2 + delta3 + ((cfg.kappa1 - cfg.kappa2) ** 2 + cfg.nu1**2 + cfg.nu2**2) * s_f0
    gamma_5 = delta2 + delta3 + ((cfg.kappa1 + cfg.kappa2) ** 2 + cfg.nu1**2 + cfg.nu2**2) * s_f0

    for name, value in (
        ("gamma_th", gamma_th),
        ("gamma_dec_2", gamma_2),
        ("gamma_dec_3", gamma_3),
        ("gamma_dec_4", gamma_4),
        ("gamma_dec_5", gamma_5),
    ):
        if value < -1e-10:
            raise NumericError(f"internal consistency: {name} = {value} is negative")

    return RateReport(
        gamma_th=gamma_th,
        gamma_dec_2=gamma_2,
        gamma_dec_3=gamma_3,
        gamma_dec_4=gamma_4,
        gamma_dec_5=gamma_5,
        Y2=y2,
        Y3=y3,
        delta2=delta2,
        delta3=delta3,
        delta4=delta2 + delta3,
        delta5=gamma_5,
        delta_plus=max(delta2, delta3),
        delta_minus=min(delta2, delta3),
    )


def _flat(pair: tuple[int, int]) -> int:
    k, l = pair
    return 4 * (k - 1) + (l - 1)


def davies_generator(cfg: ModelConfig) -> np.ndarray:
    """Weak-coupling generator on vectorized density matrices (16 x 16).

    Block-diagonal over the Liouvillian eigenspaces; on the block of the
    signed Bohr energy e it acts as the conjugate transpose of ``i`` times
    the level-shift operator there.  Component ``[rho]_{kl}`` sits at flat
    index ``4*(k-1) + (l-1)``.
    """
    table = resonance_table(cfg)
    gen = np.zeros((16, 16), dtype=complex)
    for index in range(1, 6):
        signs = (+1,) if index == 1 else (+1, -1)
        for sign in signs:
            pairs = table.pairs(index, sign)
            block = (1j * table.matrix(index, sign)).conj().T
            for a, pa in enumerate(pairs):
                for b, pb in enumerate(pairs):
                    gen[_flat(pa), _flat(pb)] = block[a, b]
    return gen
