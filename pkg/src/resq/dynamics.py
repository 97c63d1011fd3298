"""Cluster-decoupled propagation of the reduced two-qubit density matrix.

Matrix elements sharing a Bohr energy difference evolve jointly and
independently of every other group; within a group the evolution is a sum
of complex exponentials assembled from the resonance data.  Only the main
(resonance) term is propagated; the dropped remainder is second order in
the couplings, uniformly in time.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NumericError, PreconditionError
from .resonance import ModelConfig, ResonanceTable, resonance_table
from .spectral import sigma

_HERMITICITY_TOL = 1e-12
_TRACE_TOL = 1e-12

# canonical clusters of on/above-diagonal matrix positions, 1-based (k, l);
# each label c > 1 has a mirrored partner -c of transposed positions
_CANONICAL_PAIRS = {
    1: ((1, 1), (2, 2), (3, 3), (4, 4)),
    2: ((1, 3), (2, 4)),
    3: ((1, 2), (3, 4)),
    4: ((2, 3),),
    5: ((1, 4),),
}
# Bohr-energy bookkeeping: (table index, sign of E_k - E_l on the cluster)
_CLUSTER_ENERGY = {1: (1, +1), 2: (2, +1), 3: (3, +1), 4: (4, -1), 5: (5, +1)}

_PAIR_TO_CLUSTER: dict[tuple[int, int], int] = {}
for _c, _pairs in _CANONICAL_PAIRS.items():
    for _p in _pairs:
        _PAIR_TO_CLUSTER[_p] = _c
        if _p[0] != _p[1]:
            _PAIR_TO_CLUSTER[(_p[1], _p[0])] = -_c


@dataclass(frozen=True)
class DensityMatrix:
    """4x4 hermitian unit-trace matrix in the ordered energy basis."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.shape != (4, 4):
            raise DomainError(f"density matrix must be 4x4, got {m.shape}")
        scale = max(1.0, float(np.abs(m).max()))
        if float(np.abs(m - m.conj().T).max()) > _HERMITICITY_TOL * scale:
            raise DomainError("density matrix is not hermitian to 1e-12")
        if abs(m.trace() - 1.0) > _TRACE_TOL * scale:
            raise DomainError(f"density matrix trace {m.trace()} differs from 1 beyond 1e-12")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @staticmethod
    def from_populations(populations) -> "DensityMatrix":
        return DensityMatrix(np.diag(np.asarray(populations, dtype=complex)))

    @property
    def populations(self) -> np.ndarray:
        return self.matrix.diagonal().real.copy()

    @property
    def alpha(self) -> complex:
        """Two-quantum coherence in the (4,1) orientation."""
        return complex(self.matrix[3, 0])

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self.matrix).min())


@dataclass(frozen=True)
class ClusterSet:
    """Matrix positions sharing one Bohr energy difference E_k - E_l."""

    label: int
    energy: float
    pairs: tuple[tuple[int, int], ...]

    def mirror(self) -> "ClusterSet":
        return ClusterSet(-self.label, -self.energy, tuple((l, k) for (k, l) in self.pairs))


def cluster_sets(cfg: ModelConfig) -> list[ClusterSet]:
    """The five canonical clusters followed by their negative-energy mirrors.

    The canonical sets partition the on/above-diagonal positions; the
    fourth one carries a negative energy, 2*(B1 - B2).
    """
    diffs = {
        1: 0.0,
        2: 2.0 * cfg.B1,
        3: 2.0 * cfg.B2,
        4: 2.0 * (cfg.B1 - cfg.B2),
        5: 2.0 * (cfg.B1 + cfg.B2),
    }
    canonical = [ClusterSet(c, diffs[c], _CANONICAL_PAIRS[c]) for c in range(1, 6)]
    return canonical + [cs.mirror() for cs in canonical[1:]]


def cluster_label(k: int, l: int) -> int:
    """Signed cluster label of matrix position (k, l), 1-based."""
    try:
        return _PAIR_TO_CLUSTER[(k, l)]
    except KeyError:
        raise DomainError(f"matrix indices must lie in 1..4, got ({k}, {l})") from None


def same_cluster(m: int, n: int, k: int, l: int) -> bool:
    """True when positions (m, n) and (k, l) evolve jointly."""
    return cluster_label(m, n) == cluster_label(k, l)


def _cluster_resonances(table: ResonanceTable, label: int):
    """Resonance data governing the targets of a signed cluster label.

    A matrix element at position (m, n) evolves with the resonance data of
    the opposite Bohr energy E_n - E_m, so the lookup flips the sign.
    """
    index, sign = _CLUSTER_ENERGY[abs(label)]
    if label < 0:
        sign = -sign
    sign = -sign
    energy = table.signed_energy(index, sign)
    return energy, table.data(index, sign)


def _cluster_block(table: ResonanceTable, label: int, t: float) -> np.ndarray:
    pairs = _CANONICAL_PAIRS[abs(label)]
    dim = len(pairs)
    if t == 0.0:
        return np.eye(dim, dtype=complex)
    energy, data = _cluster_resonances(table, label)
    block = np.zeros((dim, dim), dtype=complex)
    for d in data:
        phase = cmath.exp(1j * t * (energy + d.delta))
        block += phase * np.outer(np.conj(d.eta_tilde), d.eta)
    return block


class Propagator:
    """Amplitude tables of one configuration frozen at a single time."""

    def __init__(self, table: ResonanceTable, t: float):
        if t < 0.0:
            raise DomainError(f"time must be nonnegative, got {t}")
        self.t = float(t)
        self.table = table
        labels = list(range(1, 6)) + list(range(-2, -6, -1))
        self.blocks = {label: _cluster_block(table, label, self.t) for label in labels}
        self._pair_index = {}
        for label in labels:
            pairs = _CANONICAL_PAIRS[abs(label)]
            if label < 0:
                pairs = tuple((l, k) for (k, l) in pairs)
            for pos, pair in enumerate(pairs):
                self._pair_index[pair] = (label, pos)

    def amplitude(self, m: int, n: int, k: int, l: int) -> complex:
        """Transition amplitude from source element (k, l) to target (m, n).

        Cross-cluster queries return exactly 0j; use ``same_cluster`` to
        distinguish structural zeros from dynamical values.
        """
        label_t, row = self._pair_index[(m, n)]
        label_s, col = self._pair_index[(k, l)]
        if label_t != label_s:
            return 0j
        return complex(self.blocks[label_t][row, col])

    def apply(self, rho: np.ndarray) -> np.ndarray:
        """Propagate all sixteen matrix elements cluster by cluster."""
        rho = np.asarray(rho, dtype=complex)
        out = np.zeros_like(rho)
        for label, block in self.blocks.items():
            pairs = _CANONICAL_PAIRS[abs(label)]
            if label < 0:
                pairs = tuple((l, k) for (k, l) in pairs)
            src = np.array([rho[k - 1, l - 1] for (k, l) in pairs])
            dst = block @ src
            for (k, l), value in zip(pairs, dst):
                out[k - 1, l - 1] = value
        return out

    def apply_hermitian(self, rho: np.ndarray) -> np.ndarray:
        """Propagate the diagonal and upper triangle, mirror the rest."""
        rho = np.asarray(rho, dtype=complex)
        out = np.zeros_like(rho)
        for label in range(1, 6):
            block = self.blocks[label]
            pairs = _CANONICAL_PAIRS[label]
            src = np.array([rho[k - 1, l - 1] for (k, l) in pairs])
            dst = block @ src
            for (k, l), value in zip(pairs, dst):
                out[k - 1, l - 1] = value
                if k != l:
                    out[l - 1, k - 1] = np.conj(value)
        return out


def amplitude(table: ResonanceTable, t: float, m: int, n: int, k: int, l: int) -> complex:
    """Single transition amplitude at time t (see ``Propagator.amplitude``)."""
    for idx in (m, n, k, l):
        if idx not in (1, 2, 3, 4):
            raise DomainError(f"matrix indices must lie in 1..4, got ({m},{n};{k},{l})")
    if not same_cluster(m, n, k, l):
        return 0j
    return Propagator(table, t).amplitude(m, n, k, l)


def evolve(rho0: DensityMatrix, t: float, table: ResonanceTable) -> DensityMatrix:
    """Reduced state at time t (main resonance term).

    Hermitian and unit-trace by construction; positivity of the output is
    not enforced (the dropped remainder can make it dip at second order).
    """
    prop = Propagator(table, t)
    return DensityMatrix(prop.apply_hermitian(rho0.matrix))


def gibbs_state(cfg: ModelConfig) -> DensityMatrix:
    """Thermal equilibrium state of the free two-qubit Hamiltonian."""
    return DensityMatrix.from_populations(cfg.gibbs_populations())


def _x_decay_rates(cfg: ModelConfig) -> tuple[float, float]:
    """Population decay constants paired with the e2/e1 weight factors."""
    d_spin2 = (cfg.lambda2**2 + cfg.mu2**2) * sigma(cfg.g, cfg.B2, cfg.beta).value
    d_spin1 = (cfg.lambda1**2 + cfg.mu1**2) * sigma(cfg.g, cfg.B1, cfg.beta).value
    return d_spin2, d_spin1


def populations_closed_form(cfg: ModelConfig, p: float, t: float):
    """Populations of the spin-aligned initial family, in closed form.

    ``p`` is the initial weight on the upper level; the returned tuple is
    the diagonal (x1, x2, x3, x4) at time t with fourth-order corrections
    dropped.  Requires shared form factors and strictly positive
    single-spin decay rates.
    """
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"p must lie in [0, 1], got {p}")
    if t < 0.0:
        raise DomainError(f"time must be nonnegative, got {t}")
    if not cfg.s10_prime:
        raise PreconditionError("closed-form populations require shared form factors")
    da, db = _x_decay_rates(cfg)
    if da <= 0.0 or db <= 0.0:
        raise PreconditionError(
            "closed-form populations require both single-spin decay rates positive"
        )
    beta = cfg.beta
    e1 = math.exp(2.0 * beta * cfg.B1)
    e2 = math.exp(2.0 * beta * cfg.B2)
    z = cfg.partition_function()
    ea = math.exp(-t * da)
    eb = math.exp(-t * db)
    ec = ea * eb

    pref1 = math.exp(-beta * (cfg.B1 + cfg.B2)) / z
    pref2 = math.exp(-beta * (cfg.B1 - cfg.B2)) / z
    pref3 = math.exp(-beta * (-cfg.B1 + cfg.B2)) / z
    pref4 = math.exp(beta * (cfg.B1 + cfg.B2)) / z

    x1 = pref1 * (
        (1.0 - ea) * (1.0 - eb)
        + p * (ea * (e2 + 1.0) + eb * (e1 + 1.0) + ec * (e1 * e2 - 1.0))
    )
    x2 = pref2 * (
        (1.0 - ea) / e2 * (p * (e2 + 1.0) - 1.0)
        + (1.0 - eb) * (-p * (e1 + 1.0) + 1.0)
        + (1.0 - ec) / e2 * (p * (e1 * e2 - 1.0) + 1.0)
    )
    x3 = pref3 * (
        (1.0 - ea) * (-p * (e2 + 1.0) + 1.0)
        + (1.0 - eb) / e1 * (p * (e1 + 1.0) - 1.0)
        + (1.0 - ec) / e1 * (p * (e1 * e2 - 1.0) + 1.0)
    )
    x4 = pref4 * (
        (1.0 - p) * (1.0 + ea / e2) * (1.0 + eb / e1)
        + p * (1.0 - ea) * (1.0 - eb)
    )

    total = x1 + x2 + x3 + x4
    if abs(total - 1.0) > 1e-12:
        raise NumericError(f"closed-form populations sum to {total}, not 1")
    return x1, x2, x3, x4


def alpha_closed_form(cfg: ModelConfig, alpha0: complex, t: float) -> complex:
    """Two-quantum coherence at time t: phase advance and exponential decay."""
    if t < 0.0:
        raise DomainError(f"time must be nonnegative, got {t}")
    table = resonance_table(cfg)
    datum = table.data(5)[0]
    eps5 = table.signed_energy(5) + datum.delta
    return cmath.exp(1j * t * eps5.real) * math.exp(-t * eps5.imag) * alpha0
