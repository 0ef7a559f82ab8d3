"""Jacobi-coordinate side of the flow: tau determinants and linearization.

A phase-space matrix with simple real spectrum maps to the projective tuple
of its (1,1)-cofactor values at the eigenvalues (``abel_jacobi``).  Under the
flow this tuple just gets multiplied componentwise by exp(t*lambda_i)
(``evolve_point``), and the matrix is recovered from tau determinants mixing
Vandermonde columns with point-weighted ones (``reconstruct``):

    b_k = tau[k-1] * tau[k+1] / tau[k]**2
    a_k = tau'[k] / tau[k] - tau'[k-1] / tau[k-1]        (tau'[0] = 0)

Tuples are stored with the first coordinate normalized to one.  The sign
convention for tau is fixed so that sign-alternating tuples (the positive
cone) give strictly positive tau values; with that normalization the
tridiagonal matrices produced by ``reconstruct`` from cone points are exactly
the totally nonnegative ones.

Tau values can overflow double precision for strongly evolved points, so the
sequence also carries (sign, log|tau|) pairs and all internal quotients are
formed in log space.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import lax
from .errors import NonGeneralDivisor, NonPositiveZ, ZeroCofactorValue

DEFAULT_GENERAL_TOL = 1e-12
DEFAULT_ZERO_COFACTOR_TOL = 1e-12


def _readonly(values, dtype=float) -> np.ndarray:
    out = np.array(values, dtype=dtype)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class JacobiPoint:
    """Nonvanishing real tuple up to overall scale, stored with f[0] = 1.

    Two raw tuples represent the same point exactly when their normalized
    forms agree componentwise.
    """

    f: np.ndarray

    def __post_init__(self):
        f = np.asarray(self.f, dtype=float)
        if f.ndim != 1 or f.size < 1:
            raise ValueError("point must be a nonempty 1-D array")
        if not np.all(np.isfinite(f)):
            raise ValueError("point entries must be finite")
        if np.any(f == 0.0):
            raise ValueError("point entries must be nonzero")
        if f[0] != 1.0:
            f = f / f[0]
            if np.any(f == 0.0) or not np.all(np.isfinite(f)):
                raise ValueError("normalization by the first entry under/overflowed")
        object.__setattr__(self, "f", _readonly(f))

    @property
    def n(self) -> int:
        return int(self.f.size)

    @classmethod
    def from_raw(cls, values) -> "JacobiPoint":
        return cls(f=np.asarray(values, dtype=float))

    def allclose(self, other: "JacobiPoint", rtol: float = 1e-9, atol: float = 0.0) -> bool:
        return bool(np.allclose(self.f, other.f, rtol=rtol, atol=atol))

    def to_json_dict(self) -> dict:
        return {"f": [float(x) for x in self.f]}

    @classmethod
    def from_json_dict(cls, data: dict) -> "JacobiPoint":
        try:
            vals = [float(x) for x in data["f"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"malformed point object: {exc}") from exc
        return cls.from_raw(np.array(vals))


@dataclass(frozen=True, eq=False)
class SignComponent:
    """Signs of f[1:] under the f[0] = 1 normalization (one of 2^(n-1) patterns)."""

    signs: tuple

    def __post_init__(self):
        if any(s not in (-1, 1) for s in self.signs):
            raise ValueError("signs must be +1 or -1")
        object.__setattr__(self, "signs", tuple(int(s) for s in self.signs))

    def __str__(self) -> str:
        return "".join("+" if s > 0 else "-" for s in self.signs)

    @classmethod
    def from_string(cls, text: str) -> "SignComponent":
        return cls(signs=tuple(1 if ch == "+" else -1 for ch in text))


def alternating_signs(n: int) -> tuple:
    """The cone pattern for f[1:]: starts negative and alternates."""
    return tuple(-1 if i % 2 == 0 else 1 for i in range(n - 1))


def sign_component(F: JacobiPoint):
    """Sign pattern of the normalized tail and whether it is the cone pattern."""
    signs = tuple(1 if x > 0 else -1 for x in F.f[1:])
    return SignComponent(signs=signs), signs == alternating_signs(F.n)


# ---------------------------------------------------------------------------
# tau determinants
# ---------------------------------------------------------------------------


def epsilon_signs(n: int) -> np.ndarray:
    """Calibrated tau signs: with these, cone points give all tau[k] > 0."""
    ks = np.arange(n + 1)
    return (-1.0) ** ((ks * n - ks * (ks + 1) // 2) % 2)


def _tau_matrix(lams: np.ndarray, f: np.ndarray, k: int, last_power: int) -> np.ndarray:
    """Columns (1, lam, .., lam^(n-k-1), f, f*lam, .., f*lam^(k-2), f*lam^last)."""
    n = lams.size
    cols = [lams**j for j in range(n - k)]
    for j in range(k - 1):
        cols.append(f * lams**j)
    if k >= 1:
        cols.append(f * lams**last_power)
    return np.column_stack(cols)


class _LaplaceTerms:
    """Closed-form Laplace expansion data for the tau determinants.

    The determinant with n-k leading Vandermonde columns and k point-weighted
    columns expands over size-k index sets S as

        (-1)**(sum(S) + parity(k)) * prod(f[S]) * vdm(lams[S]) * vdm(lams[~S])

    (1-based row sums; vdm factors are positive for an increasing spectrum).
    The primed determinants carry an extra factor sum(lams[S]) from the
    shifted top power (a bialternant identity).  Summing the signed terms
    with the largest magnitude factored out is accurate at any coordinate
    grading, with relative error ~ eps divided by the generality ratio.
    """

    def __init__(self, lams: np.ndarray, f: np.ndarray):
        n = lams.size
        with np.errstate(divide="ignore"):
            gaps = np.log(np.abs(lams[None, :] - lams[:, None]) + np.eye(n))
        np.fill_diagonal(gaps, 0.0)
        count = 1 << n
        masks = ((np.arange(count)[:, None] >> np.arange(n)[None, :]) & 1).astype(float)
        self.popcounts = masks.sum(axis=1).astype(int)
        in_pairs = 0.5 * np.einsum("mi,ij,mj->m", masks, gaps, masks)
        comp = (count - 1) ^ np.arange(count)
        with np.errstate(divide="ignore"):
            self.term_logs = masks @ np.log(np.abs(f)) + in_pairs + in_pairs[comp]
        row_sums = masks @ np.arange(1, n + 1)
        neg_f = masks @ (f < 0.0).astype(float)
        self.term_signs = np.where((row_sums + neg_f) % 2 == 0, 1.0, -1.0)
        self.e1 = masks @ lams
        self.n = n

    def signed_sum(self, k: int, primed: bool):
        """(sign, log|value|, generality) of the size-k signed term sum."""
        sel = self.popcounts == k
        logs = self.term_logs[sel]
        signs = self.term_signs[sel]
        if primed:
            extra = self.e1[sel]
            with np.errstate(divide="ignore"):
                logs = logs + np.log(np.abs(extra))
            signs = signs * np.sign(extra)
        # fixed parity of the point-weighted column positions
        if (k * self.n - k * (k - 1) // 2) % 2:
            signs = -signs
        m = float(np.max(logs))
        if m == -math.inf:
            return 0.0, -math.inf, 0.0
        scaled = np.exp(logs - m)
        total = float(np.dot(signs, scaled))
        bound = float(np.sum(scaled))
        if total == 0.0:
            return 0.0, -math.inf, 0.0
        return math.copysign(1.0, total), m + math.log(abs(total)), abs(total) / bound


def _exp_or_saturate(x: float) -> float:
    if x == -math.inf:
        return 0.0
    try:
        return math.exp(x)
    except OverflowError:
        return math.inf


@dataclass(frozen=True, eq=False)
class TauSequence:
    """Tau and tau' values for indices 0..n, with log-scale companions.

    ``tau[0]`` is the (positive) Vandermonde determinant of the spectrum and
    ``tau_prime[0] = 0`` by convention.  ``generality[k]`` in [0, 1] is
    |tau[k]| relative to its cancellation-free Laplace bound (the sum of the
    magnitudes of all expansion terms): 1 on sign-alternating points, 0 at a
    genuine zero, and independent of coordinate grading.
    """

    tau: np.ndarray
    tau_prime: np.ndarray
    sign_tau: np.ndarray
    log_abs_tau: np.ndarray
    sign_tau_prime: np.ndarray
    log_abs_tau_prime: np.ndarray
    generality: np.ndarray

    @property
    def n(self) -> int:
        return int(self.tau.size - 1)


def tau_sequence(spec: lax.Spectrum, F) -> TauSequence:
    """Tau determinants of a point against a simple spectrum.

    ``F`` may be a JacobiPoint (canonical values) or any raw nonvanishing
    tuple; raw tuples scale tau[k] by the k-th power of the normalization.
    """
    lams = spec.lambdas
    n = lams.size
    f = F.f if isinstance(F, JacobiPoint) else np.asarray(F, dtype=float)
    if f.shape != (n,):
        raise ValueError(f"point length {f.shape} does not match spectrum size {n}")
    if np.any(f == 0.0):
        raise ValueError("point entries must be nonzero")

    eps = epsilon_signs(n)
    sign_t = np.zeros(n + 1)
    log_t = np.full(n + 1, -math.inf)
    sign_p = np.zeros(n + 1)
    log_p = np.full(n + 1, -math.inf)
    generality = np.zeros(n + 1)

    terms = _LaplaceTerms(lams, f)
    for k in range(n + 1):
        s, lg, gen = terms.signed_sum(k, primed=False)
        sign_t[k] = s * eps[k]
        log_t[k] = lg
        generality[k] = gen
        if k >= 1:
            s2, lg2, _ = terms.signed_sum(k, primed=True)
            sign_p[k] = s2 * eps[k]
            log_p[k] = lg2

    with np.errstate(over="ignore"):
        tau = sign_t * np.array([_exp_or_saturate(x) for x in log_t])
        tau_prime = sign_p * np.array([_exp_or_saturate(x) for x in log_p])
    return TauSequence(
        tau=_readonly(tau),
        tau_prime=_readonly(tau_prime),
        sign_tau=_readonly(sign_t),
        log_abs_tau=_readonly(log_t),
        sign_tau_prime=_readonly(sign_p),
        log_abs_tau_prime=_readonly(log_p),
        generality=_readonly(generality),
    )


def theta(k: int, Z, spec: lax.Spectrum) -> float:
    """Degenerate theta value on a strictly positive tuple.

    Plain determinant of the mixed Vandermonde/Z column pattern divided by
    sqrt(Z_1 * ... * Z_n); restricting to positive tuples keeps the square
    root single-valued.
    """
    lams = spec.lambdas
    n = lams.size
    Z = np.asarray(Z, dtype=float)
    if Z.shape != (n,):
        raise ValueError(f"tuple length {Z.shape} does not match spectrum size {n}")
    if np.any(Z <= 0.0):
        raise NonPositiveZ("theta requires a strictly positive tuple")
    if not 0 <= k <= n:
        raise ValueError(f"theta index {k} out of range 0..{n}")
    det = float(np.linalg.det(_tau_matrix(lams, Z, k, last_power=k - 1)))
    return det * math.exp(-0.5 * float(np.sum(np.log(Z))))


# ---------------------------------------------------------------------------
# linearization and its inverse
# ---------------------------------------------------------------------------


def abel_jacobi(
    L: lax.LaxMatrix,
    spec: lax.Spectrum | None = None,
    zero_tol: float = DEFAULT_ZERO_COFACTOR_TOL,
) -> JacobiPoint:
    """Linearization map: (1,1)-cofactor values at the eigenvalues, normalized.

    Raises ZeroCofactorValue when a value vanishes relative to the largest
    one (non-general position).
    """
    if spec is None:
        spec = lax.spectrum(L)
    vals = lax.chop_values(L, spec.lambdas)
    scale = float(np.max(np.abs(vals)))
    if scale == 0.0 or np.any(np.abs(vals) <= zero_tol * scale):
        i = int(np.argmin(np.abs(vals)))
        raise ZeroCofactorValue(
            f"cofactor value {vals[i]!r} at eigenvalue {spec.lambdas[i]!r} is "
            "numerically zero"
        )
    return JacobiPoint.from_raw(vals)


def is_general_point(spec: lax.Spectrum, F, tol: float = DEFAULT_GENERAL_TOL) -> bool:
    """True when every tau determinant is nonzero at scale, i.e. the
    reconstruction formulas are nonsingular at this point."""
    ts = tau_sequence(spec, F)
    return bool(np.all(ts.generality > tol))


def reconstruct(
    spec: lax.Spectrum, F, general_tol: float = DEFAULT_GENERAL_TOL
) -> lax.LaxMatrix:
    """Inverse of the linearization map on general points.

    Quotients are evaluated in log space so strongly evolved points (raw tau
    far outside double range) still reconstruct cleanly.
    """
    ts = tau_sequence(spec, F)
    n = ts.n
    for k in range(n + 1):
        if ts.sign_tau[k] == 0.0 or ts.generality[k] <= general_tol:
            raise NonGeneralDivisor(k)
    b = np.empty(n - 1)
    for k in range(1, n):
        sign = ts.sign_tau[k - 1] * ts.sign_tau[k + 1]
        b[k - 1] = sign * _exp_or_saturate(
            ts.log_abs_tau[k - 1] + ts.log_abs_tau[k + 1] - 2.0 * ts.log_abs_tau[k]
        )
    ratios = np.zeros(n + 1)
    for k in range(1, n + 1):
        if ts.sign_tau_prime[k] != 0.0:
            ratios[k] = (
                ts.sign_tau_prime[k]
                * ts.sign_tau[k]
                * _exp_or_saturate(ts.log_abs_tau_prime[k] - ts.log_abs_tau[k])
            )
    a = np.diff(ratios)
    return lax.LaxMatrix(n=n, a=a, b=b)


def evolve_point(F0: JacobiPoint, spec: lax.Spectrum, t: float) -> JacobiPoint:
    """Multiplicative flow: multiply coordinate i by exp(t * lambda_i).

    Exponents are shifted by their maximum before exponentiating, which is
    harmless projectively and avoids overflow.
    """
    lams = spec.lambdas
    if F0.n != lams.size:
        raise ValueError("point and spectrum sizes differ")
    z = t * lams
    w = np.exp(z - np.max(z)) * F0.f
    return JacobiPoint.from_raw(w)
