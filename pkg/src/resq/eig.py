"""Dense eigenproblem for tiny (n <= 4) complex non-hermitian matrices.

Eigenvalues come from the characteristic polynomial (Faddeev-LeVerrier
coefficients, Durand-Kerner roots); eigenvectors from adjugate null-space
extraction with one inverse-iteration polish.  The matrix is first split
into weakly-connected components of its exact zero pattern so that
eigenvalues repeated across decoupled blocks are computed independently
to full precision.  Dense QR would be overkill at these sizes, and the
rate formulas need an eigen-route that is independent of LAPACK anyway.
"""

from __future__ import annotations

import cmath

import numpy as np

from .errors import NumericError

_EPS = float(np.finfo(float).eps)
_DK_TOL = 1e-13
_DK_MAX_ITER = 400
_CLUSTER_TOL = 1e-6


def char_poly(a: np.ndarray) -> np.ndarray:
    """Monic characteristic polynomial coefficients, highest power first."""
    a = np.asarray(a, dtype=complex)
    n = a.shape[0]
    coeffs = np.zeros(n + 1, dtype=complex)
    coeffs[0] = 1.0
    m = np.zeros_like(a)
    eye = np.eye(n, dtype=complex)
    for k in range(1, n + 1):
        m = a @ m + coeffs[k - 1] * eye
        coeffs[k] = -np.trace(a @ m) / k
    return coeffs


def _poly_eval(coeffs: np.ndarray, z: complex) -> complex:
    acc = 0j
    for c in coeffs:
        acc = acc * z + c
    return acc


def _roots_quadratic(b: complex, c: complex) -> list[complex]:
    # z^2 + b z + c, cancellation-safe: larger-magnitude root first
    s = cmath.sqrt(b * b - 4.0 * c)
    if abs(-b + s) >= abs(-b - s):
        r1 = 0.5 * (-b + s)
    else:
        r1 = 0.5 * (-b - s)
    if r1 == 0:
        return [0j, 0j]
    return [r1, c / r1]


def _durand_kerner(coeffs: np.ndarray) -> list[complex]:
    deg = len(coeffs) - 1
    radius = 1.0 + max(abs(c) ** (1.0 / (k + 1)) for k, c in enumerate(coeffs[1:]))
    seed = 0.4 + 0.9j
    roots = [radius * seed**k for k in range(1, deg + 1)]
    scale = max(1.0, radius)
    for _ in range(_DK_MAX_ITER):
        shift = 0.0
        for i in range(deg):
            denom = 1.0 + 0j
            for j in range(deg):
                if j != i:
                    d = roots[i] - roots[j]
                    if d == 0:
                        d = _EPS * scale * (1 + 1j)
                    denom *= d
            step = _poly_eval(coeffs, roots[i]) / denom
            roots[i] -= step
            shift = max(shift, abs(step))
        scale = max(1.0, max(abs(r) for r in roots))
        if shift <= _DK_TOL * scale:
            break
    return roots


def _newton_polish(coeffs: np.ndarray, root: complex) -> complex:
    deriv = np.polyder(np.poly1d(coeffs)).coeffs
    for _ in range(2):
        d = _poly_eval(deriv, root)
        if d == 0:
            break
        root = root - _poly_eval(coeffs, root) / d
    return root


def _vieta_polish(coeffs: np.ndarray, roots: list[complex]) -> list[complex]:
    """Recompute a near-double pair from the exact symmetric functions.

    A pair of nearly equal roots carries only half the working precision
    out of Durand-Kerner; its sum and product, recovered from the monic
    coefficients and the well-separated remaining roots, restore it.
    """
    n = len(roots)
    scale = max(1.0, max(abs(r) for r in roots))
    groups: list[list[int]] = []
    used = set()
    for i in range(n):
        if i in used:
            continue
        group = [i]
        used.add(i)
        for j in range(i + 1, n):
            if j not in used and abs(roots[i] - roots[j]) <= _CLUSTER_TOL * scale:
                group.append(j)
                used.add(j)
        groups.append(group)
    for group in groups:
        if len(group) != 2:
            continue
        others = [roots[k] for k in range(n) if k not in group]
        prod_others = 1.0 + 0j
        ok = True
        for r in others:
            prod_others *= r
            if abs(prod_others) < 1e3 * _EPS * scale ** len(others):
                ok = False
                break
        if not ok:
            continue
        s = -coeffs[1] - sum(others)
        q = coeffs[-1] / prod_others
        pair = _roots_quadratic(-s, q)
        roots[group[0]], roots[group[1]] = pair[0], pair[1]
    return roots


def poly_roots(coeffs: np.ndarray) -> list[complex]:
    """All roots of a monic polynomial of degree <= 4."""
    coeffs = np.asarray(coeffs, dtype=complex)
    deg = len(coeffs) - 1

    # peel off numerically-exact zero roots by coefficient magnitude
    zeros = 0
    scale = max((abs(c) ** (1.0 / (k + 1)) for k, c in enumerate(coeffs[1:])), default=0.0)
    if scale == 0.0:
        return [0j] * deg
    scaled = coeffs / scale ** np.arange(deg + 1)
    ztol = 1e4 * _EPS * max(1.0, float(np.abs(scaled).max()))
    while deg - zeros >= 1 and abs(scaled[deg - zeros]) <= ztol:
        zeros += 1
    coeffs = scaled[: deg - zeros + 1]
    d = deg - zeros

    if d == 0:
        roots = []
    elif d == 1:
        roots = [-coeffs[1]]
    elif d == 2:
        roots = _roots_quadratic(coeffs[1], coeffs[2])
    else:
        roots = _durand_kerner(coeffs)
        roots = [_newton_polish(coeffs, r) for r in roots]
        roots = _vieta_polish(coeffs, roots)
    return [r * scale for r in roots] + [0j] * zeros


def _components(a: np.ndarray) -> list[list[int]]:
    """Weakly connected components of the exact nonzero pattern."""
    n = a.shape[0]
    adj = (a != 0) | (a != 0).T
    seen = [False] * n
    comps = []
    for start in range(n):
        if seen[start]:
            continue
        stack = [start]
        seen[start] = True
        comp = []
        while stack:
            v = stack.pop()
            comp.append(v)
            for u in range(n):
                if not seen[u] and (adj[v, u] or adj[u, v]):
                    seen[u] = True
                    stack.append(u)
        comps.append(sorted(comp))
    return comps


def eigvals(a: np.ndarray) -> np.ndarray:
    """Eigenvalues of a small dense complex matrix (unordered)."""
    a = np.asarray(a, dtype=complex)
    n = a.shape[0]
    if a.shape != (n, n) or n > 4 or n < 1:
        raise NumericError(f"eigensolver supports square matrices up to 4x4, got {a.shape}")
    vals: list[complex] = []
    for comp in _components(a):
        block = a[np.ix_(comp, comp)]
        if len(comp) == 1:
            vals.append(complex(block[0, 0]))
        else:
            vals.extend(poly_roots(char_poly(block)))
    return np.array(vals, dtype=complex)


def _adjugate(b: np.ndarray) -> np.ndarray:
    n = b.shape[0]
    if n == 1:
        return np.ones((1, 1), dtype=complex)
    adj = np.empty((n, n), dtype=complex)
    idx = list(range(n))
    for i in range(n):
        for j in range(n):
            minor = b[np.ix_([r for r in idx if r != i], [c for c in idx if c != j])]
            adj[j, i] = (-1) ** (i + j) * np.linalg.det(minor)
    return adj


def _solve_regularized(b: np.ndarray, rhs: np.ndarray, reg: float) -> np.ndarray:
    n = b.shape[0]
    for factor in (1.0, 1e3, 1e6):
        try:
            return np.linalg.solve(b + reg * factor * np.eye(n), rhs)
        except np.linalg.LinAlgError:
            continue
    raise NumericError("inverse-iteration solve failed")


def _null_vector(b: np.ndarray) -> np.ndarray:
    """Approximate null vector of a numerically singular matrix."""
    n = b.shape[0]
    if n == 1:
        return np.ones(1, dtype=complex)
    adj = _adjugate(b)
    norms = np.linalg.norm(adj, axis=0)
    col = int(np.argmax(norms))
    scale = float(np.abs(b).max()) or 1.0
    if norms[col] > 1e3 * _EPS * scale ** (n - 1):
        v = adj[:, col]
    else:
        # adjugate vanished (higher-order degeneracy); fall back to a fixed probe
        v = np.ones(n, dtype=complex) + 1j * np.arange(1, n + 1)
    v = v / np.linalg.norm(v)
    # one inverse-iteration polish against the (near-singular) shifted matrix
    w = _solve_regularized(b, v, 64.0 * _EPS * scale)
    return w / np.linalg.norm(w)


def eig_pairs(a: np.ndarray):
    """Biorthonormal eigentriples ``(value, right, left)`` of a small matrix.

    ``left`` vectors satisfy ``a.conj().T @ left = conj(value) * left`` and
    are scaled so that ``vdot(left_s, right_s') = delta_ss'`` for simple
    spectra.
    """
    a = np.asarray(a, dtype=complex)
    n = a.shape[0]
    out = []
    for comp in _components(a):
        block = a[np.ix_(comp, comp)]
        k = len(comp)
        if k == 1:
            lam = complex(block[0, 0])
            right = np.zeros(n, dtype=complex)
            left = np.zeros(n, dtype=complex)
            right[comp[0]] = 1.0
            left[comp[0]] = 1.0
            out.append((lam, right, left))
            continue
        for lam in poly_roots(char_poly(block)):
            vr = _null_vector(block - lam * np.eye(k))
            vl = _null_vector(block.conj().T - np.conj(lam) * np.eye(k))
            overlap = np.vdot(vl, vr)
            if abs(overlap) < 1e-8:
                raise NumericError(
                    f"left/right eigenvector overlap {abs(overlap):.2e} too small; "
                    "matrix is too close to non-diagonalizable"
                )
            vl = vl / np.conj(overlap)
            right = np.zeros(n, dtype=complex)
            left = np.zeros(n, dtype=complex)
            right[comp] = vr
            left[comp] = vl
            out.append((lam, right, left))
    return out
