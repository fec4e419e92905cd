"""Monte-Carlo estimation of logical error rates under depolarizing noise,
the heuristic fit ``p_L = p^(d_fit/2) exp(c0 + c1 p + c2 p^2)``, break-even
pseudo-thresholds, and rotated surface code baselines.

Noise is a single round on the data qubits with perfect syndromes. X and Z
parts are decoded independently.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from statistics import NormalDist

import numpy as np

from . import gf2_core as gf2
from .code_builder import CssCode
from .decoder import DecoderConfig, OracleConfig, make_decoder
from .gf2_core import BinaryMatrix, BinaryVector

BLOCK_SHOTS = 20_000
CACHE_LIMIT = 200_000
_Z95 = NormalDist().inv_cdf(0.975)


class FitError(ValueError):
    """Too few usable points, or a degenerate design matrix."""


class NoCrossing(ValueError):
    """The fitted curve never meets the break-even curve in range."""


@dataclass(frozen=True)
class PauliError:
    x_part: BinaryVector
    z_part: BinaryVector

    def __post_init__(self) -> None:
        if self.x_part.len != self.z_part.len:
            raise ValueError("X and Z parts differ in length")

    @property
    def n(self) -> int:
        return self.x_part.len

    def weight(self) -> int:
        return int(np.count_nonzero(self.x_part.to_dense() | self.z_part.to_dense()))


@dataclass(frozen=True)
class SimStats:
    p: float
    shots: int
    failures: int
    p_l: float
    ci_low: float
    ci_high: float
    seed: int

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class StopRule:
    max_shots: int = 10_000_000
    target_failures: int = 500


@dataclass(frozen=True)
class FitParams:
    d_fit: float
    c0: float
    c1: float
    c2: float

    def __call__(self, p):
        p = np.asarray(p, dtype=np.float64)
        return p ** (self.d_fit / 2) * np.exp(self.c0 + self.c1 * p + self.c2 * p * p)

    def to_dict(self) -> dict:
        return asdict(self)


def wilson_interval(failures: int, shots: int, z: float = _Z95) -> tuple[float, float]:
    if shots == 0:
        return 0.0, 1.0
    ph = failures / shots
    denom = 1 + z * z / shots
    centre = (ph + z * z / (2 * shots)) / denom
    half = z * math.sqrt(ph * (1 - ph) / shots + z * z / (4 * shots * shots)) / denom
    # clamp rounding so the interval always brackets the point estimate
    return min(ph, max(0.0, centre - half)), max(ph, min(1.0, centre + half))


def make_stats(p: float, shots: int, failures: int, seed: int) -> SimStats:
    lo, hi = wilson_interval(failures, shots)
    return SimStats(p, shots, failures, failures / shots if shots else 0.0, lo, hi, seed)


# sampling -----------------------------------------------------------------------


def _sample_parts(n: int, p: float, rng: np.random.Generator, shots: int) -> tuple[np.ndarray, np.ndarray]:
    u = rng.random((shots, n))
    # [0, p/3) X, [p/3, 2p/3) Y, [2p/3, p) Z
    x = u < 2 * p / 3
    z = (u >= p / 3) & (u < p)
    return x.astype(np.uint8), z.astype(np.uint8)


def sample_depolarizing(n: int, p: float, rng: np.random.Generator) -> PauliError:
    """Independent depolarizing noise: X, Y, Z each with probability p/3."""
    if not 0 <= p <= 1:
        raise ValueError("p must lie in [0, 1]")
    x, z = _sample_parts(n, p, rng, 1)
    return PauliError(BinaryVector.from_dense(x[0]), BinaryVector.from_dense(z[0]))


# decoding a batch of shots ------------------------------------------------------


class _Side:
    """One decoding side: check matrix, decoder, syndrome cache and a
    row-space membership test for residuals."""

    def __init__(self, h_check: np.ndarray, h_stab: np.ndarray, prior: float,
                 config: DecoderConfig | OracleConfig) -> None:
        self.h_check = h_check.astype(np.int64)
        self.decoder = make_decoder(h_check, prior, config)
        # r lies in rs(h_stab) iff r is orthogonal to ker(h_stab)
        self.dual = gf2.kernel_basis(BinaryMatrix.from_dense(h_stab)).to_dense().astype(np.int64)
        self.cache: dict[bytes, np.ndarray] = {}

    def correct(self, errors: np.ndarray) -> np.ndarray:
        """Residual-is-logical flag per row of ``errors``."""
        synd = (errors.astype(np.int64) @ self.h_check.T & 1).astype(np.uint8)
        hit = synd.any(axis=1)
        corr = np.zeros_like(errors)
        rows = np.flatnonzero(hit)
        misses, keys = [], []
        for r in rows:
            key = synd[r].tobytes()
            cached = self.cache.get(key)
            if cached is None:
                misses.append(r)
                keys.append(key)
            else:
                corr[r] = cached
        if misses:
            uniq = {}
            for r, key in zip(misses, keys):
                uniq.setdefault(key, r)
            order = list(uniq.values())
            est = self.decoder.decode_batch(synd[order])
            found = dict(zip(uniq.keys(), est))
            if len(self.cache) + len(found) <= CACHE_LIMIT:
                self.cache.update(found)
            for r, key in zip(misses, keys):
                corr[r] = found[key]
        residual = errors ^ corr
        if self.dual.size == 0:
            return np.zeros(len(errors), dtype=bool)
        return ((residual.astype(np.int64) @ self.dual.T) & 1).any(axis=1)


class ShotRunner:
    """Decoders for both sides of a code at one physical error rate."""

    def __init__(self, code: CssCode, p: float, config: DecoderConfig | OracleConfig) -> None:
        prior = min(max(2 * p / 3, 1e-12), 0.5 - 1e-12)
        hx, hz = code.h_x.to_dense(), code.h_z.to_dense()
        self.n = code.n
        # Z errors are seen by X checks and must be fixed modulo Z stabilizers
        self.z_side = _Side(hx, hz, prior, config)
        self.x_side = _Side(hz, hx, prior, config)

    def failures(self, ex: np.ndarray, ez: np.ndarray) -> np.ndarray:
        return self.z_side.correct(ez) | self.x_side.correct(ex)


def run_shot(code: CssCode, decoder: DecoderConfig | OracleConfig, p: float,
             rng: np.random.Generator, error: PauliError | None = None) -> bool:
    """One sample-decode-check cycle; ``error`` overrides the sampled noise."""
    if error is None:
        error = sample_depolarizing(code.n, p, rng)
    runner = ShotRunner(code, p, decoder)
    return bool(runner.failures(error.x_part.to_dense()[None, :], error.z_part.to_dense()[None, :])[0])


def block_size(block: int, cap: int = BLOCK_SHOTS) -> int:
    """Shots in block ``block``: doubling from 1000 up to ``cap``."""
    return min(cap, 1000 << min(block, 30))


def block_rng(seed: int, p_index: int, block: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, p_index, block]))


def run_block(runner: ShotRunner, p: float, seed: int, p_index: int, block: int,
              shots: int = BLOCK_SHOTS) -> int:
    rng = block_rng(seed, p_index, block)
    ex, ez = _sample_parts(runner.n, p, rng, shots)
    noisy = np.flatnonzero(ex.any(axis=1) | ez.any(axis=1))
    if noisy.size == 0:
        return 0
    return int(runner.failures(ex[noisy], ez[noisy]).sum())


# process-pool plumbing: one runner per worker and p
_WORKER: dict = {}


def _worker_init(code: CssCode, config) -> None:
    _WORKER.clear()
    _WORKER["code"], _WORKER["config"] = code, config


def _worker_block(args) -> int:
    p, seed, p_index, block, shots = args
    key = ("runner", p)
    if key not in _WORKER:
        _WORKER.pop(next((k for k in _WORKER if isinstance(k, tuple)), None), None)
        _WORKER[key] = ShotRunner(_WORKER["code"], p, _WORKER["config"])
    return run_block(_WORKER[key], p, seed, p_index, block, shots)


def default_workers() -> int:
    env = os.environ.get("TBCODE_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def monte_carlo(code: CssCode, decoder: DecoderConfig | OracleConfig, p_list, stop: StopRule = StopRule(),
                seed: int = 0, workers: int | None = None, block_shots: int = BLOCK_SHOTS) -> list[SimStats]:
    """Estimate p_L at each p.

    Shots come in blocks of preset size, block ``b`` at point ``i`` drawing from
    ``SeedSequence([seed, i, b])``. Blocks are consumed in index order and the
    run stops after the first block that reaches the failure target or the shot
    cap, so the counts do not depend on the number of workers.
    """
    p_list = list(p_list)
    if not p_list:
        raise ValueError("p_list must be nonempty")
    workers = workers or default_workers()
    out = []
    pool = ProcessPoolExecutor(workers, initializer=_worker_init, initargs=(code, decoder)) if workers > 1 else None
    try:
        for i, p in enumerate(p_list):
            runner = None if pool else ShotRunner(code, p, decoder)
            shots = failures = block = 0
            while shots < stop.max_shots and failures < stop.target_failures:
                wave = []
                planned = shots
                for _ in range(workers):
                    size = min(block_size(block + len(wave), block_shots), stop.max_shots - planned)
                    if size <= 0:
                        break
                    wave.append((p, seed, i, block + len(wave), size))
                    planned += size
                if pool:
                    results = list(pool.map(_worker_block, wave))
                else:
                    results = [run_block(runner, *args[:4], shots=args[4]) if p > 0 else 0 for args in wave]
                for args, f in zip(wave, results):
                    shots += args[4]
                    failures += f
                    block += 1
                    if failures >= stop.target_failures:
                        break
            out.append(make_stats(p, shots, failures, seed))
    finally:
        if pool:
            pool.shutdown()
    return out


# fitting ------------------------------------------------------------------------


def fit_curve(points) -> FitParams:
    """Exact least squares for ``ln p_L = (d/2) ln p + c0 + c1 p + c2 p^2``.

    Points with ``p_L <= 0`` carry no information on the log scale and are
    dropped before fitting.
    """
    pts = [(float(p), float(pl)) for p, pl in points if pl > 0 and p > 0]
    if len(pts) < 4:
        raise FitError(f"need at least 4 points with p_L > 0, got {len(pts)}")
    p = np.array([q for q, _ in pts])
    y = np.log([pl for _, pl in pts])
    design = np.column_stack([np.log(p) / 2, np.ones_like(p), p, p * p])
    # column scaling keeps the solve well conditioned
    scale = np.linalg.norm(design, axis=0)
    scaled = design / scale
    if np.linalg.matrix_rank(scaled) < 4:
        raise FitError("design matrix is singular (too few distinct p values)")
    coef, *_ = np.linalg.lstsq(scaled, y, rcond=None)
    d_fit, c0, c1, c2 = coef / scale
    return FitParams(float(d_fit), float(c0), float(c1), float(c2))


def break_even(p, k: int):
    """Probability that at least one of k unencoded qubits fails."""
    return 1 - (1 - np.asarray(p, dtype=np.float64)) ** k


def pseudo_threshold(fit: FitParams, k: int, lo: float = 1e-6, hi: float = 0.5, tol: float = 1e-14) -> float:
    """Smallest p in (lo, hi) where the fitted p_L meets ``1 - (1-p)^k``.

    ``k`` counts the bare qubits in the break-even reference. The published
    pseudo-thresholds line up with ``k = 1``, a single unprotected qubit,
    rather than with the code's own k.

    A log-spaced scan brackets the first sign change, then bisection refines it.
    """
    f = lambda q: float(fit(q) - break_even(q, k))
    grid = np.geomspace(lo, hi, 4001)
    vals = fit(grid) - break_even(grid, k)
    if vals[0] >= 0:
        raise NoCrossing("fitted curve already above break-even at the lower end")
    change = np.flatnonzero(vals >= 0)
    if change.size == 0:
        raise NoCrossing("fitted curve stays below break-even")
    a, b = grid[change[0] - 1], grid[change[0]]
    while b - a > tol * max(1.0, b):
        mid = (a + b) / 2
        if f(mid) < 0:
            a = mid
        else:
            b = mid
    return (a + b) / 2


# surface code baselines ---------------------------------------------------------


def surface_code_combine(p_l_single: float, k: int) -> float:
    """Failure probability of k independent single-qubit memories."""
    if not 0 <= p_l_single <= 1:
        raise ValueError("p_l_single must lie in [0, 1]")
    return 1 - (1 - p_l_single) ** k


def surface_code_baseline(d: int) -> CssCode:
    """Rotated planar surface code on a d x d grid, ``[[d^2, 1, d]]``.

    Faces sit between grid points and alternate X/Z in a checkerboard. Weight-2
    X faces run along the top and bottom edges, Z faces along the left and
    right edges.
    """
    if d < 2:
        raise ValueError("d must be at least 2")
    q = lambda i, j: i * d + j
    xs, zs = [], []
    for i in range(-1, d):
        for j in range(-1, d):
            cells = [(a, b) for a in (i, i + 1) for b in (j, j + 1) if 0 <= a < d and 0 <= b < d]
            is_x = (i + j) % 2 == 0
            if len(cells) == 4:
                (xs if is_x else zs).append(cells)
            elif len(cells) == 2:
                horizontal = cells[0][0] == cells[1][0]
                if horizontal and is_x:
                    xs.append(cells)
                elif not horizontal and not is_x:
                    zs.append(cells)

    def matrix(faces):
        h = np.zeros((len(faces), d * d), dtype=np.uint8)
        for r, cells in enumerate(faces):
            for a, b in cells:
                h[r, q(a, b)] = 1
        return BinaryMatrix.from_dense(h)

    code = CssCode(matrix(xs), matrix(zs), name=f"surface d={d}")
    if not code.commutes() or code.k != 1:
        raise AssertionError(f"surface code construction broken for d={d}")
    code.populate_logicals()
    return code
