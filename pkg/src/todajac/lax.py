"""Tridiagonal Lax matrices: minors, spectra and cofactor-vector machinery.

Conventions used throughout the package:

* A Lax matrix stores its diagonal ``a`` (length n) and subdiagonal ``b``
  (length n-1); the superdiagonal is fixed to one.  Phase-space membership
  requires every ``b`` entry to be nonzero.
* Polynomials are real coefficient vectors in ascending order, so ``c[k]``
  multiplies ``lambda**k`` (the ``numpy.polynomial`` convention).
* Matrix row/column indices are 0-based.  Component indices (``v_k``) and tau
  indices keep their mathematical numbering: components run 1..n, tau 0..n.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from numpy.polynomial import polynomial as npoly

from .errors import (
    BadIndex,
    DegenerateComponent,
    NonRealSpectrum,
    NonSimpleSpectrum,
)

DEFAULT_SEPARATION = 1e-10
DEFAULT_IMAG_TOL = 1e-8


def _readonly(values, dtype=float) -> np.ndarray:
    out = np.array(values, dtype=dtype)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class LaxMatrix:
    """Tridiagonal phase-space matrix with unit superdiagonal.

    ``a`` is the diagonal, ``b`` the subdiagonal.  All ``b`` entries must be
    nonzero; the dense form places 1 on the superdiagonal and 0 elsewhere off
    the three bands.
    """

    n: int
    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.a, dtype=float)
        b = np.asarray(self.b, dtype=float)
        if self.n < 2:
            raise ValueError("LaxMatrix needs n >= 2")
        if a.shape != (self.n,):
            raise ValueError(f"diagonal must have length {self.n}, got {a.shape}")
        if b.shape != (self.n - 1,):
            raise ValueError(f"subdiagonal must have length {self.n - 1}, got {b.shape}")
        if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
            raise ValueError("matrix entries must be finite")
        if np.any(b == 0.0):
            raise ValueError("all subdiagonal entries must be nonzero")
        object.__setattr__(self, "a", _readonly(a))
        object.__setattr__(self, "b", _readonly(b))

    def to_dense(self) -> np.ndarray:
        m = np.zeros((self.n, self.n))
        m[np.arange(self.n), np.arange(self.n)] = self.a
        idx = np.arange(self.n - 1)
        m[idx, idx + 1] = 1.0
        m[idx + 1, idx] = self.b
        return m

    def to_json_dict(self) -> dict:
        return {"n": self.n, "a": [float(x) for x in self.a], "b": [float(x) for x in self.b]}

    @classmethod
    def from_json_dict(cls, data: dict) -> "LaxMatrix":
        try:
            n = int(data["n"])
            a = [float(x) for x in data["a"]]
            b = [float(x) for x in data["b"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"malformed matrix object: {exc}") from exc
        return cls(n=n, a=np.array(a), b=np.array(b))


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Strictly increasing list of simple real eigenvalues.

    ``separation`` is the minimal admissible gap between consecutive values;
    the ``positive`` property records whether the smallest eigenvalue is
    strictly positive.
    """

    lambdas: np.ndarray
    separation: float = DEFAULT_SEPARATION

    def __post_init__(self):
        lams = np.asarray(self.lambdas, dtype=float)
        if lams.ndim != 1 or lams.size == 0:
            raise ValueError("spectrum must be a nonempty 1-D array")
        if not np.all(np.isfinite(lams)):
            raise ValueError("spectrum entries must be finite")
        if np.any(np.diff(lams) <= 0):
            raise ValueError("spectrum must be strictly increasing")
        if lams.size > 1 and np.min(np.diff(lams)) <= self.separation:
            raise NonSimpleSpectrum(
                f"eigenvalue gap {np.min(np.diff(lams)):.3e} at or below separation "
                f"tolerance {self.separation:.3e}"
            )
        object.__setattr__(self, "lambdas", _readonly(lams))

    @property
    def n(self) -> int:
        return int(self.lambdas.size)

    @property
    def positive(self) -> bool:
        return bool(self.lambdas[0] > 0.0)

    def to_json_dict(self) -> dict:
        return {"lambdas": [float(x) for x in self.lambdas]}

    @classmethod
    def from_json_dict(cls, data: dict, separation: float = DEFAULT_SEPARATION) -> "Spectrum":
        try:
            lams = [float(x) for x in data["lambdas"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"malformed spectrum object: {exc}") from exc
        return cls(lambdas=np.array(lams), separation=separation)


@dataclass(frozen=True, eq=False)
class PolynomialVector:
    """Vector of univariate real polynomials (ascending coefficients).

    ``variable`` tags which affine coordinate the entries live in: ``"x"``
    for the descending chart, ``"y"`` for the ascending one.
    """

    entries: tuple
    variable: str

    def __post_init__(self):
        if self.variable not in ("x", "y"):
            raise ValueError("variable tag must be 'x' or 'y'")
        object.__setattr__(self, "entries", tuple(_readonly(e) for e in self.entries))

    def __len__(self) -> int:
        return len(self.entries)

    def __getitem__(self, idx: int) -> np.ndarray:
        return self.entries[idx]


# ---------------------------------------------------------------------------
# minor-polynomial recurrences
# ---------------------------------------------------------------------------


def _leading_minor_polys(L: LaxMatrix) -> list:
    """Coefficients of det((L - x E)[:k, :k]) for k = 0..n (ascending)."""
    polys = [np.array([1.0])]
    prev = np.array([1.0])
    cur = np.array([L.a[0], -1.0])
    polys.append(cur)
    for k in range(2, L.n + 1):
        # det_k = (a_k - x) det_{k-1} - b_{k-1} det_{k-2}
        nxt = npoly.polymul(np.array([L.a[k - 1], -1.0]), cur)
        nxt = npoly.polysub(nxt, L.b[k - 2] * prev)
        polys.append(nxt)
        prev, cur = cur, nxt
    return polys


def _trailing_minor_polys(L: LaxMatrix) -> dict:
    """Coefficients of det((L - x E)[k-1:, k-1:]) keyed by math index k = 1..n+1."""
    polys = {L.n + 1: np.array([1.0]), L.n: np.array([L.a[-1], -1.0])}
    for k in range(L.n - 1, 0, -1):
        nxt = npoly.polymul(np.array([L.a[k - 1], -1.0]), polys[k + 1])
        nxt = npoly.polysub(nxt, L.b[k - 1] * polys[k + 2])
        polys[k] = nxt
    return polys


def char_poly(L: LaxMatrix) -> np.ndarray:
    """Monic characteristic polynomial (-1)^n det(L - x E), ascending coefficients."""
    p = _leading_minor_polys(L)[L.n]
    coeffs = p * ((-1.0) ** L.n)
    return coeffs


def chop_values(L: LaxMatrix, points) -> np.ndarray:
    """Evaluate the (1,1)-cofactor of (L - x E) at the given points.

    Uses the trailing three-term determinant recurrence directly on values,
    which is better conditioned than evaluating stored coefficients.
    """
    x = np.atleast_1d(np.asarray(points, dtype=float))
    nxt = np.ones_like(x)
    cur = L.a[-1] - x
    for k in range(L.n - 1, 1, -1):
        cur, nxt = (L.a[k - 1] - x) * cur - L.b[k - 1] * nxt, cur
    return cur


def chop_integral(L: LaxMatrix) -> np.ndarray:
    """Coefficients of the (1,1)-cofactor of (L - x E).

    Degree n-1 with leading coefficient (-1)**(n-1); this is the conserved
    polynomial whose values at the eigenvalues linearize the flow.
    """
    return _trailing_minor_polys(L)[2]


# ---------------------------------------------------------------------------
# eigenvalues
# ---------------------------------------------------------------------------


def symmetric_tridiagonal_eigenvalues(diag, off) -> np.ndarray:
    """All eigenvalues of a symmetric tridiagonal matrix by bisection.

    Uses the classic negative-pivot count of the shifted LDL^T recurrence
    (a Sturm sequence) to bracket each eigenvalue inside the Gershgorin
    interval, then bisects every bracket to machine precision.
    """
    d = np.asarray(diag, dtype=float)
    e = np.asarray(off, dtype=float)
    n = d.size
    if n == 1:
        return d.copy()
    if e.shape != (n - 1,):
        raise ValueError("off-diagonal must have length n-1")
    e2 = e * e

    radius = np.zeros(n)
    radius[:-1] += np.abs(e)
    radius[1:] += np.abs(e)
    lo = float(np.min(d - radius))
    hi = float(np.max(d + radius))
    eps = np.finfo(float).eps
    pad = eps * max(abs(lo), abs(hi), 1.0)
    lo -= pad
    hi += pad
    pivmin = max(float(np.max(e2)), 1.0) * 1e-290

    def count_below(x: np.ndarray) -> np.ndarray:
        # negative-pivot count; a vanishing pivot counts as negative
        q = d[0] - x
        q = np.where(np.abs(q) < pivmin, -pivmin, q)
        cnt = (q < 0).astype(np.int64)
        for k in range(1, n):
            q = d[k] - x - e2[k - 1] / q
            q = np.where(np.abs(q) < pivmin, -pivmin, q)
            cnt += q < 0
        return cnt

    targets = np.arange(1, n + 1)
    lo_v = np.full(n, lo)
    hi_v = np.full(n, hi)
    tol = 4.0 * eps
    while True:
        width = hi_v - lo_v
        limit = tol * np.maximum(np.maximum(np.abs(lo_v), np.abs(hi_v)), 1.0)
        if np.all(width <= limit):
            break
        mid = 0.5 * (lo_v + hi_v)
        go_left = count_below(mid) >= targets
        hi_v = np.where(go_left, mid, hi_v)
        lo_v = np.where(go_left, lo_v, mid)
    return 0.5 * (lo_v + hi_v)


def _charpoly_value_and_derivative(L: LaxMatrix, x: np.ndarray):
    """det(L - x E) and its x-derivative via the leading-minor recurrence.

    Evaluating the determinant recurrence directly at the points sidesteps
    the conditioning of the monomial coefficients.
    """
    p_prev = np.zeros_like(x)
    p = np.ones_like(x)
    dp_prev = np.zeros_like(x)
    dp = np.zeros_like(x)
    for k in range(L.n):
        bq = L.b[k - 1] if k >= 1 else 0.0
        p_next = (L.a[k] - x) * p - bq * p_prev
        dp_next = -p + (L.a[k] - x) * dp - bq * dp_prev
        p_prev, p = p, p_next
        dp_prev, dp = dp, dp_next
    return p, dp


def charpoly_root_eigenvalues(L: LaxMatrix, imag_tol: float = DEFAULT_IMAG_TOL) -> np.ndarray:
    """Eigenvalues as roots of the characteristic polynomial (companion matrix).

    Fallback route for matrices with sign-mixed subdiagonals.  Companion
    roots are polished by Newton steps on the determinant value recurrence,
    which restores the accuracy lost to coefficient conditioning.  Raises
    NonRealSpectrum when a root strays off the real axis.
    """
    roots = npoly.polyroots(char_poly(L))
    scale = max(1.0, float(np.max(np.abs(roots))))
    if np.any(np.abs(roots.imag) > imag_tol * scale):
        worst = roots[np.argmax(np.abs(roots.imag))]
        raise NonRealSpectrum(f"root {worst} has nonnegligible imaginary part")
    lams = roots.real.copy()
    for _ in range(3):
        val, der = _charpoly_value_and_derivative(L, lams)
        step = np.where(der != 0.0, val / np.where(der != 0.0, der, 1.0), 0.0)
        step = np.clip(step, -0.1 * scale, 0.1 * scale)
        lams = lams - step
    return np.sort(lams)


def spectrum(
    L: LaxMatrix,
    separation: float = DEFAULT_SEPARATION,
    imag_tol: float = DEFAULT_IMAG_TOL,
) -> Spectrum:
    """All eigenvalues of L, sorted ascending.

    With a positive subdiagonal, L is diagonally similar to the symmetric
    tridiagonal matrix with off-diagonals sqrt(b), and the Sturm bisection
    route applies (all eigenvalues real).  Otherwise falls back to roots of
    the characteristic polynomial.
    """
    if np.all(L.b > 0):
        lams = symmetric_tridiagonal_eigenvalues(L.a, np.sqrt(L.b))
    else:
        lams = charpoly_root_eigenvalues(L, imag_tol=imag_tol)
    gaps = np.diff(lams)
    if lams.size > 1 and np.min(gaps) <= separation:
        i = int(np.argmin(gaps))
        raise NonSimpleSpectrum(
            f"eigenvalues {lams[i]!r} and {lams[i + 1]!r} closer than {separation:.1e}"
        )
    return Spectrum(lambdas=lams, separation=separation)


# ---------------------------------------------------------------------------
# minors of dense matrices
# ---------------------------------------------------------------------------


def _validate_index_list(idx, n: int, name: str) -> tuple:
    try:
        out = tuple(int(i) for i in idx)
    except (TypeError, ValueError) as exc:
        raise BadIndex(f"{name} must be a sequence of integers") from exc
    if len(out) == 0:
        raise BadIndex(f"{name} must be nonempty")
    if any(i < 0 or i >= n for i in out):
        raise BadIndex(f"{name} {out} out of bounds for size {n}")
    if any(out[i] >= out[i + 1] for i in range(len(out) - 1)):
        raise BadIndex(f"{name} {out} must be strictly increasing")
    return out


def minor(M, rows: Sequence[int], cols: Sequence[int]) -> float:
    """Determinant of the submatrix selected by 0-based row/column indices.

    Exact cofactor expansion for orders up to 3, pivoted LU above.
    """
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise BadIndex("matrix must be square")
    n = M.shape[0]
    r = _validate_index_list(rows, n, "rows")
    c = _validate_index_list(cols, n, "cols")
    if len(r) != len(c):
        raise BadIndex("row and column index lists must have equal length")
    sub = M[np.ix_(r, c)]
    k = len(r)
    if k == 1:
        return float(sub[0, 0])
    if k == 2:
        return float(sub[0, 0] * sub[1, 1] - sub[0, 1] * sub[1, 0])
    if k == 3:
        return float(
            sub[0, 0] * (sub[1, 1] * sub[2, 2] - sub[1, 2] * sub[2, 1])
            - sub[0, 1] * (sub[1, 0] * sub[2, 2] - sub[1, 2] * sub[2, 0])
            + sub[0, 2] * (sub[1, 0] * sub[2, 1] - sub[1, 1] * sub[2, 0])
        )
    return float(np.linalg.det(sub))


# ---------------------------------------------------------------------------
# cofactor vectors and component divisors
# ---------------------------------------------------------------------------


def cofactor_vectors(L: LaxMatrix) -> tuple:
    """Polynomial kernel vectors of (L - x E) built from row cofactors.

    Returns ``(v_minus, v_plus)``:

    * ``v_minus[k]`` is monic of degree k (signed cofactor along the last
      row); its first entry is the constant 1.
    * ``v_plus[k]`` is the signed cofactor along the first row, of degree
      n-1-k with leading coefficient (-1)**(n-1) * b_1*...*b_k.

    At every eigenvalue the two vectors are proportional with ratio equal to
    the (1,1)-cofactor: chop(lam) * v_minus(lam) = v_plus(lam).
    """
    lead = _leading_minor_polys(L)
    trail = _trailing_minor_polys(L)
    minus = []
    plus = []
    bprod = 1.0
    for j in range(1, L.n + 1):
        minus.append(((-1.0) ** (j - 1)) * lead[j - 1])
        plus.append(((-1.0) ** (j + 1)) * bprod * trail[j + 1])
        if j <= L.n - 1:
            bprod *= L.b[j - 1]
    return (
        PolynomialVector(entries=tuple(minus), variable="x"),
        PolynomialVector(entries=tuple(plus), variable="y"),
    )


@dataclass(frozen=True, eq=False)
class ComponentDivisor:
    """Zeros of one glued cofactor-vector component on the two charts."""

    roots_minus: np.ndarray
    roots_plus: np.ndarray
    off_real_axis: bool


def _component_roots(coeffs: np.ndarray, imag_tol: float):
    if np.all(coeffs == 0.0):
        raise DegenerateComponent("component polynomial is identically zero")
    if coeffs.size == 1:
        return np.array([]), False
    roots = npoly.polyroots(coeffs)
    roots = roots[np.argsort(roots.real, kind="stable")]
    flagged = bool(np.any(np.abs(roots.imag) > imag_tol * (1.0 + np.abs(roots.real))))
    if not flagged:
        roots = roots.real
    return roots, flagged


def divisor_of_component(
    L: LaxMatrix, k: int, imag_tol: float = DEFAULT_IMAG_TOL
) -> ComponentDivisor:
    """Roots of the k-th cofactor-vector component (math index 1 <= k <= n).

    The descending-chart entry contributes k-1 roots, the ascending-chart
    entry n-k roots.  Complex roots are returned with ``off_real_axis`` set.
    """
    if not 1 <= k <= L.n:
        raise BadIndex(f"component index {k} out of range 1..{L.n}")
    v_minus, v_plus = cofactor_vectors(L)
    rm, flag_m = _component_roots(v_minus[k - 1], imag_tol)
    rp, flag_p = _component_roots(v_plus[k - 1], imag_tol)
    return ComponentDivisor(
        roots_minus=rm, roots_plus=rp, off_real_axis=flag_m or flag_p
    )
