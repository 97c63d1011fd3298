"""Concurrence, the spin-aligned initial family, and entanglement lifetimes.

Concurrence follows the standard two-qubit construction: the spectrum of
``rho (Sy x Sy) conj(rho) (Sy x Sy)`` in the energy basis gives four
nonnegative numbers whose square roots combine into the monotone
``C = max(0, sqrt(nu1) - sqrt(nu2) - sqrt(nu3) - sqrt(nu4))``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import eig
from .dynamics import DensityMatrix, evolve
from .errors import DomainError, NumericError, PreconditionError
from .resonance import ModelConfig, rates, resonance_table

# Sy (x) Sy in the ordered energy basis; an involution
_SPIN_FLIP = np.array(
    [
        [0.0, 0.0, 0.0, -1.0],
        [0.0, 0.0, 1.0, 0.0],
        [0.0, 1.0, 0.0, 0.0],
        [-1.0, 0.0, 0.0, 0.0],
    ],
    dtype=complex,
)

_NEG_EIG_CLAMP = 1e-10
_NEG_EIG_ERROR = 1e-8


@dataclass(frozen=True)
class InitialStateParams:
    """Amplitudes of the pure superposition of |++> and |-->."""

    a1: complex
    a2: complex

    def __post_init__(self):
        if self.a1 == 0 and self.a2 == 0:
            raise DomainError("initial-state amplitudes must not both vanish")

    @property
    def norm_sq(self) -> float:
        return abs(self.a1) ** 2 + abs(self.a2) ** 2

    @property
    def p(self) -> float:
        """Initial population of the upper level."""
        return abs(self.a1) ** 2 / self.norm_sq

    @property
    def alpha0(self) -> complex:
        """Initial two-quantum coherence, conj(a1) * a2 / (|a1|^2 + |a2|^2)."""
        return np.conj(self.a1) * self.a2 / self.norm_sq


@dataclass(frozen=True)
class ConcurrenceReport:
    """Spin-flip spectrum (descending), the signed combination D, and C."""

    nu: tuple[float, float, float, float]
    D: float
    C: float


def initial_state(params: InitialStateParams) -> DensityMatrix:
    """Rank-one projector onto the normalized superposition."""
    norm = math.sqrt(params.norm_sq)
    psi = np.zeros(4, dtype=complex)
    psi[0] = params.a1 / norm
    psi[3] = params.a2 / norm
    return DensityMatrix(np.outer(psi, psi.conj()))


def xi_matrix(rho: DensityMatrix | np.ndarray) -> np.ndarray:
    """Spin-flip product matrix rho * Y * conj(rho) * Y with Y = Sy x Sy."""
    m = rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)
    scale = max(1.0, float(np.abs(m).max()))
    if float(np.abs(m - m.conj().T).max()) > 1e-10 * scale:
        raise DomainError("xi_matrix requires a hermitian input")
    return m @ _SPIN_FLIP @ m.conj() @ _SPIN_FLIP


def concurrence(rho: DensityMatrix | np.ndarray) -> ConcurrenceReport:
    """Concurrence of a two-qubit state.

    Eigenvalues of the spin-flip product are real and nonnegative up to
    rounding; values in [-1e-10, 0) are clamped before the square roots
    and anything below -1e-8 raises ``NumericError``.
    """
    xi = xi_matrix(rho)
    vals = eig.eigvals(xi)
    scale = max(1.0, float(np.abs(vals).max()))
    if float(np.abs(vals.imag).max()) > 1e-8 * scale:
        raise NumericError(
            f"spin-flip spectrum has imaginary parts up to {np.abs(vals.imag).max():.2e}"
        )
    nu = np.sort(vals.real)[::-1]
    if nu[-1] < -_NEG_EIG_ERROR * scale:
        raise NumericError(f"spin-flip spectrum has negative eigenvalue {nu[-1]:.2e}")
    nu = np.where((nu < 0.0) & (nu >= -_NEG_EIG_CLAMP * scale), 0.0, nu)
    nu = np.clip(nu, 0.0, None)
    roots = np.sqrt(nu)
    d_value = float(roots[0] - roots[1] - roots[2] - roots[3])
    return ConcurrenceReport(nu=tuple(float(v) for v in nu), D=d_value, C=max(0.0, d_value))


def _thm3_deltas(cfg: ModelConfig):
    report = rates(cfg)
    return report.delta2, report.delta3, report.delta5


def _check_bound_preconditions(cfg: ModelConfig, p: float, kappa0: float):
    if not 0.0 < p < 1.0:
        raise DomainError(f"time bounds require p strictly inside (0, 1), got {p}")
    delta2, delta3, delta5 = _thm3_deltas(cfg)
    if delta2 <= 0.0 or delta3 <= 0.0:
        raise PreconditionError(
            "time bounds require both single-spin thermalization rates positive"
        )
    vk = cfg.varkappa
    if vk == 0.0:
        raise PreconditionError("time bounds require a nonzero coupling")
    if vk >= kappa0 * math.sqrt(p * (1.0 - p)):
        raise PreconditionError(
            f"coupling varkappa={vk:.3g} exceeds kappa0*sqrt(p(1-p))="
            f"{kappa0 * math.sqrt(p * (1.0 - p)):.3g}"
        )
    return delta2, delta3, delta5


def death_time_bound(cfg: ModelConfig, p: float, c_a: float, kappa0: float = 1.0) -> float:
    """Time after which the entanglement of the initial family has died.

    Largest of three expressions combining the decay constants with
    ``log(c_a * sqrt(p(1-p)) / varkappa^2)``-type factors; the calibration
    constant ``c_a`` is not fixed by theory and defaults to caller choice.
    """
    if c_a <= 0.0:
        raise DomainError(f"C_A must be positive, got {c_a}")
    delta2, delta3, delta5 = _check_bound_preconditions(cfg, p, kappa0)
    vk2 = cfg.varkappa**2
    pq = p * (1.0 - p)
    return max(
        math.log(c_a * math.sqrt(pq) / vk2) / delta5,
        math.log(c_a * pq / vk2) / (delta2 + delta3),
        c_a / (delta2 + delta3),
    )


def survival_time_bound(cfg: ModelConfig, p: float, c_b: float, kappa0: float = 1.0) -> float:
    """Time below which the entanglement of the initial family survives."""
    if c_b <= 0.0:
        raise DomainError(f"C_B must be positive, got {c_b}")
    delta2, delta3, delta5 = _check_bound_preconditions(cfg, p, kappa0)
    vk2 = cfg.varkappa**2
    pq = p * (1.0 - p)
    delta_plus = max(delta2, delta3)
    delta_minus = min(delta2, delta3)
    return min(
        math.log1p(c_b * pq) / (delta2 + delta3),
        math.log1p(c_b * vk2) / delta_plus,
        c_b / (delta5 - 0.5 * delta_minus),
    )


@dataclass(frozen=True)
class TimeBounds:
    """Death/survival time bounds with their calibration constants."""

    t_A: float
    t_B: float
    C_A: float
    C_B: float


def time_bounds(cfg: ModelConfig, p: float, c_a: float, c_b: float, kappa0: float = 1.0) -> TimeBounds:
    return TimeBounds(
        t_A=death_time_bound(cfg, p, c_a, kappa0),
        t_B=survival_time_bound(cfg, p, c_b, kappa0),
        C_A=c_a,
        C_B=c_b,
    )


def numerical_death_time(
    cfg: ModelConfig,
    rho0: DensityMatrix,
    t_max: float,
    grid_n: int,
    table=None,
):
    """Empirical disentanglement time on a grid, refined by bisection.

    Returns the smallest time after which the signed combination D stays
    negative at every later grid point, refined on the final sign change
    to 1e-6 * t_max.  Returns None when D is still nonnegative at t_max.
    """
    if t_max <= 0.0:
        raise DomainError(f"t_max must be positive, got {t_max}")
    if grid_n < 2:
        raise DomainError(f"grid_n must be at least 2, got {grid_n}")
    if table is None:
        table = resonance_table(cfg)
    times = np.linspace(0.0, t_max, grid_n)

    def d_of(t: float) -> float:
        return concurrence(evolve(rho0, t, table)).D

    d_values = np.array([d_of(t) for t in times])
    if d_values[-1] >= 0.0:
        return None
    nonneg = np.nonzero(d_values >= 0.0)[0]
    if len(nonneg) == 0:
        return 0.0
    last = int(nonneg[-1])
    lo, hi = times[last], times[last + 1]
    tol = 1e-6 * t_max
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if d_of(mid) >= 0.0:
            lo = mid
        else:
            hi = mid
    return float(hi)


def calibrate_constants(
    cfgs,
    ps,
    kappa0: float = 1.0,
    samples: int = 20,
    max_rounds: int = 40,
):
    """Empirically calibrate the bound constants over a configuration sweep.

    Grows C_A by factors of two until D < 0 at ``samples`` times past every
    death bound, and shrinks C_B likewise until C > 0 strictly before every
    survival bound with the ordering t_B <= t0 <= t_A intact.  Returns the
    calibrated (C_A, C_B).
    """
    c_a, c_b = 1.0, 1.0

    def sweep_ok(ca, cb):
        for cfg in cfgs:
            table = resonance_table(cfg)
            report = rates(cfg)
            relax = 1.0 / min(report.delta2, report.delta3)
            for p in ps:
                rho0 = initial_state(InitialStateParams(math.sqrt(p), math.sqrt(1.0 - p)))
                t_a = death_time_bound(cfg, p, ca, kappa0)
                t_b = survival_time_bound(cfg, p, cb, kappa0)
                if t_b > t_a:
                    return False, "shrink_cb"
                for t in np.linspace(t_a, max(2.0 * t_a, t_a + 30.0 * relax), samples):
                    if concurrence(evolve(rho0, t, table)).D >= 0.0:
                        return False, "grow_ca"
                for t in np.linspace(0.0, t_b, samples, endpoint=False):
                    if concurrence(evolve(rho0, t, table)).C <= 0.0:
                        return False, "shrink_cb"
                t0 = numerical_death_time(
                    cfg, rho0, t_max=2.0 * t_a + 30.0 * relax, grid_n=400, table=table
                )
                if t0 is None or t0 > t_a:
                    return False, "grow_ca"
                if t_b > t0:
                    return False, "shrink_cb"
        return True, None

    for _ in range(max_rounds):
        ok, action = sweep_ok(c_a, c_b)
        if ok:
            return c_a, c_b
        if action == "grow_ca":
            c_a *= 2.0
        else:
            c_b *= 0.5
    raise NumericError(
        f"calibration did not converge within {max_rounds} rounds (C_A={c_a}, C_B={c_b})"
    )
