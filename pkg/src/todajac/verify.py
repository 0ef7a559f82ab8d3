"""Randomized verification of the positive-cone characterization.

Forward direction: sample sign-alternating points over positive spectra,
reconstruct, and require the result to pass the tridiagonal TNN test.
Converse direction: sample TNN phase-space matrices (half by evolving cone
constructions to a random time, half by rejection sampling) and require the
linearization to land in the alternating cone.

Every sample draws from its own RNG stream keyed by (seed, direction,
index), so reports are byte-identical however the loop is scheduled; the
TODA_WORKERS environment variable (0 or unset = sequential) fans the loop
out to a process pool.
"""

from __future__ import annotations

import itertools
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import jacobi, lax, tnn
from .errors import NonGeneralDivisor, TodaError

DEFAULT_SPEC_RANGE = (0.1, 10.0)
DEFAULT_COORD_LOG_RANGE = 3.0
DEFAULT_TOL = 1e-9

_FORWARD = 0
_CONVERSE = 1
_PATTERN = 2


# ---------------------------------------------------------------------------
# samplers
# ---------------------------------------------------------------------------


def sample_spectrum(rng, n, lo=DEFAULT_SPEC_RANGE[0], hi=DEFAULT_SPEC_RANGE[1], min_gap=None):
    """Sorted positive eigenvalues, resampled until gaps clear min_gap."""
    if min_gap is None:
        min_gap = 1e-6 * (hi - lo)
    while True:
        lams = np.sort(rng.uniform(lo, hi, n))
        if n == 1 or np.min(np.diff(lams)) > min_gap:
            return lax.Spectrum(lams)


def sample_point(rng, n, signs, log_range=DEFAULT_COORD_LOG_RANGE):
    """Point with |coordinates| log-uniform and the given tail sign pattern."""
    mags = np.exp(rng.uniform(-log_range, log_range, n))
    f = np.concatenate(([mags[0]], np.asarray(signs, dtype=float) * mags[1:]))
    return jacobi.JacobiPoint.from_raw(f)


def sample_cone_point(rng, n, log_range=DEFAULT_COORD_LOG_RANGE):
    return sample_point(rng, n, jacobi.alternating_signs(n), log_range)


def sample_tnn_rejection(
    rng, n, a_range=(0.05, 3.0), b_range=(0.01, 1.0), max_tries=2000
):
    """Rejection-sample a TNN phase-space matrix.

    Falls back to a bidiagonal-product construction (always TNN) if the try
    budget is exhausted, keeping the stream deterministic either way.
    """
    for _ in range(max_tries):
        L = lax.LaxMatrix(
            n=n, a=rng.uniform(*a_range, n), b=rng.uniform(*b_range, n - 1)
        )
        if tnn.is_tnn_tridiagonal(L, tol=0.0).is_tnn:
            return L
    c = rng.uniform(0.05, 1.0, n - 1)
    d = rng.uniform(0.1, 2.0, n)
    a = d + np.concatenate(([0.0], c))
    return lax.LaxMatrix(n=n, a=a, b=c * d[:-1])


# ---------------------------------------------------------------------------
# per-sample checks (top level so a process pool can pickle them)
# ---------------------------------------------------------------------------


def _forward_case(args):
    n, seed, index, tol, spec_lo, spec_hi, coord_range = args
    rng = np.random.default_rng([seed, _FORWARD, index])
    spec = sample_spectrum(rng, n, spec_lo, spec_hi)
    point = sample_cone_point(rng, n, coord_range)
    case = {"spectrum": spec.to_json_dict(), "point": point.to_json_dict()}
    try:
        L = jacobi.reconstruct(spec, point)
    except TodaError as exc:
        return index, False, f"reconstruction failed: {exc}", case
    report = tnn.is_tnn_tridiagonal(L, tol=tol)
    if not report.is_tnn:
        case["matrix"] = L.to_json_dict()
        return index, False, f"reconstruction not TNN: {report.to_json_dict()}", case
    return index, True, None, case


def _converse_case(args):
    n, seed, index, tol, spec_lo, spec_hi, coord_range = args
    rng = np.random.default_rng([seed, _CONVERSE, index])
    if index % 2 == 0:
        spec = sample_spectrum(rng, n, spec_lo, spec_hi)
        point = sample_cone_point(rng, n, coord_range)
        t = float(rng.uniform(-1.5, 1.5))
        L = jacobi.reconstruct(spec, jacobi.evolve_point(point, spec, t))
    else:
        L = sample_tnn_rejection(rng, n)
    case = {"matrix": L.to_json_dict()}
    try:
        image = jacobi.abel_jacobi(L)
    except TodaError as exc:
        return index, False, f"linearization failed: {exc}", case
    _, in_cone = jacobi.sign_component(image)
    if not in_cone:
        case["point"] = image.to_json_dict()
        return index, False, "image not in the alternating cone", case
    return index, True, None, case


def _pattern_case(args):
    n, seed, index, tol, spec_lo, spec_hi, coord_range, signs = args
    rng = np.random.default_rng([seed, _PATTERN, index])
    # resample within the stream until the draw is general
    for _ in range(256):
        spec = sample_spectrum(rng, n, spec_lo, spec_hi)
        point = sample_point(rng, n, signs, coord_range)
        try:
            L = jacobi.reconstruct(spec, point)
        except NonGeneralDivisor:
            continue
        report = tnn.is_tnn_tridiagonal(L, tol=tol)
        case = {
            "spectrum": spec.to_json_dict(),
            "point": point.to_json_dict(),
            "matrix": L.to_json_dict(),
        }
        if report.is_tnn:
            return index, False, "non-cone reconstruction is TNN", case
        return index, True, None, case
    return index, False, "no general draw found for the pattern", {}


# ---------------------------------------------------------------------------
# report
# ---------------------------------------------------------------------------


@dataclass(eq=False)
class VerificationReport:
    samples: int
    failures: int
    failure_cases: list
    config: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.failures != len(self.failure_cases):
            raise ValueError("failures must equal the number of failure cases")

    def to_json_dict(self) -> dict:
        return {
            "samples": self.samples,
            "failures": self.failures,
            "failure_cases": self.failure_cases,
            "config": self.config,
        }


def workers_from_env() -> int:
    raw = os.environ.get("TODA_WORKERS", "").strip()
    if not raw:
        return 0
    try:
        return max(0, int(raw))
    except ValueError:
        return 0


def _run_cases(fn, arglist, workers: int):
    if workers > 0 and len(arglist) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(fn, arglist, chunksize=max(1, len(arglist) // (4 * workers))))
    else:
        results = [fn(a) for a in arglist]
    return sorted(results, key=lambda r: r[0])


def run_verification(
    n: int,
    samples: int,
    seed: int,
    direction: str = "both",
    tol: float = DEFAULT_TOL,
    spec_range=DEFAULT_SPEC_RANGE,
    coord_log_range: float = DEFAULT_COORD_LOG_RANGE,
    workers: int | None = None,
    keep_cases_up_to: int = 10,
) -> VerificationReport:
    """Run the sampled checks and aggregate a replayable report.

    Failures always carry the (seed, direction, index) replay key; full
    sampled objects are embedded only while the failure count stays at or
    below ``keep_cases_up_to``.
    """
    if not 2 <= n <= 8:
        raise ValueError("n must be between 2 and 8")
    if samples < 0:
        raise ValueError("samples must be nonnegative")
    if direction not in ("forward", "converse", "both"):
        raise ValueError(f"unknown direction {direction!r}")
    if workers is None:
        workers = workers_from_env()
    spec_lo, spec_hi = float(spec_range[0]), float(spec_range[1])
    if not 0.0 < spec_lo < spec_hi:
        raise ValueError("spectrum range must be positive and increasing")

    runs = []
    if direction in ("forward", "both"):
        runs.append(("forward", _forward_case))
    if direction in ("converse", "both"):
        runs.append(("converse", _converse_case))

    total = 0
    failure_cases = []
    for tag, fn in runs:
        args = [
            (n, seed, i, tol, spec_lo, spec_hi, coord_log_range) for i in range(samples)
        ]
        for index, ok, diagnostic, case in _run_cases(fn, args, workers):
            total += 1
            if not ok:
                failure_cases.append(
                    {
                        "direction": tag,
                        "index": index,
                        "replay_key": [seed, _FORWARD if tag == "forward" else _CONVERSE, index],
                        "diagnostic": diagnostic,
                        "case": case,
                    }
                )
    if len(failure_cases) > keep_cases_up_to:
        for entry in failure_cases:
            entry.pop("case", None)

    return VerificationReport(
        samples=total,
        failures=len(failure_cases),
        failure_cases=failure_cases,
        config={
            "n": n,
            "seed": seed,
            "samples_per_direction": samples,
            "direction": direction,
            "tolerance": tol,
            "spectrum_range": [spec_lo, spec_hi],
            "coord_log_range": coord_log_range,
        },
    )


def verify_sign_patterns(
    n: int,
    samples_per_pattern: int,
    seed: int,
    tol: float = DEFAULT_TOL,
    spec_range=DEFAULT_SPEC_RANGE,
    coord_log_range: float = DEFAULT_COORD_LOG_RANGE,
    workers: int | None = None,
) -> dict:
    """For every non-alternating sign pattern, count non-TNN reconstructions.

    Returns a mapping pattern-string -> {"samples", "non_tnn", "failures"},
    where failures lists the replayable indices of any TNN hit (there should
    be none).
    """
    if workers is None:
        workers = workers_from_env()
    cone = jacobi.alternating_signs(n)
    results = {}
    offset = 0
    for bits in itertools.product((1, -1), repeat=n - 1):
        if bits == cone:
            continue
        key = str(jacobi.SignComponent(signs=bits))
        args = [
            (n, seed, offset + i, tol, spec_range[0], spec_range[1], coord_log_range, bits)
            for i in range(samples_per_pattern)
        ]
        offset += samples_per_pattern
        bad = []
        for index, ok, diagnostic, _ in _run_cases(_pattern_case, args, workers):
            if not ok:
                bad.append({"index": index, "diagnostic": diagnostic})
        results[key] = {
            "samples": samples_per_pattern,
            "non_tnn": samples_per_pattern - len(bad),
            "failures": bad,
        }
    return results
