"""Minimum weight of nontrivial logical operators.

``exact_distance`` enumerates every element of each logical coset, per
connected component. ``distance_upper_bound`` runs a randomized
information-set search and only certifies an upper bound.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from . import gf2_core as gf2
from .code_builder import CssCode, split_components
from .gf2_core import BinaryMatrix, BinaryVector, _rref

Side = Literal["x", "z", "both"]

TABLE_BITS = 20


class CapExceeded(RuntimeError):
    """Kernel too large for exhaustive enumeration."""


class NoLogicals(ValueError):
    """The code encodes no qubits, so its distance is undefined."""


@dataclass(frozen=True)
class DistanceResult:
    value: int
    certainty: Literal["exact", "upper_bound"]
    witness: BinaryVector
    side: Side

    def to_dict(self) -> dict:
        return {"d": self.value, "certainty": self.certainty,
                "witness_weight": self.witness.weight(), "side": self.side}


def _weights(block: np.ndarray) -> np.ndarray:
    counts = np.bitwise_count(block)
    return counts[:, 0].astype(np.int64) if block.shape[1] == 1 else counts.sum(axis=1, dtype=np.int64)


def _span_table(gens: np.ndarray, words: int) -> np.ndarray:
    table = np.zeros((1, words), dtype=np.uint64)
    for g in gens:
        table = np.concatenate([table, table ^ g])
    return table


def min_coset_weight(stabs: np.ndarray, logicals: np.ndarray) -> tuple[int, np.ndarray]:
    """Min weight over ``span(stabs) + (span(logicals) minus 0)``, exhaustively.

    The stabilizer span is split into a precomputed table over the first
    generators and a Gray-code walk over the rest, so each step is one
    vectorized XOR-and-popcount over the table.
    """
    words = stabs.shape[1] if stabs.size else logicals.shape[1]
    low = min(len(stabs), TABLE_BITS)
    table = _span_table(stabs[:low], words)
    high = stabs[low:]
    shifts = _span_table(logicals, words)[1:]
    best, best_vec = np.iinfo(np.int64).max, None
    offset = np.zeros(words, dtype=np.uint64)
    for step in range(1 << len(high)):
        if step:
            offset = offset ^ high[(step & -step).bit_length() - 1]
        for shift in shifts:
            w = _weights(table ^ (shift ^ offset))
            i = int(np.argmin(w))
            if w[i] < best:
                best, best_vec = int(w[i]), table[i] ^ shift ^ offset
    return best, best_vec


def _side_pieces(h_check: BinaryMatrix, h_other: BinaryMatrix) -> tuple[np.ndarray, np.ndarray, int]:
    """Stabilizer basis and logical coset representatives inside ker(h_check)."""
    kernel = gf2.kernel_basis(h_check)
    stab_data, pivots = _rref(h_other.data.copy(), h_other.cols)
    stabs = stab_data[: len(pivots)]
    logicals = gf2.independent_modulo(kernel, h_other)
    return stabs, logicals.data, kernel.rows


def kernel_dims(code: CssCode) -> list[tuple[int, int]]:
    """(dim ker h_x, dim ker h_z) for each connected component."""
    out = []
    for comp in split_components(code):
        c = comp.code
        out.append((c.n - gf2.rank(c.h_x), c.n - gf2.rank(c.h_z)))
    return out


def exact_distance(code: CssCode, dim_cap: int = 24) -> DistanceResult:
    """Exact distance by exhaustive coset enumeration.

    Both the Z-type side (ker h_x mod rs h_z) and the X-type side are
    searched; the reported value is the smaller one. The cap applies to each
    component's kernel dimension.
    """
    comps = split_components(code)
    for comp in comps:
        c = comp.code
        dims = (c.n - gf2.rank(c.h_x), c.n - gf2.rank(c.h_z))
        if max(dims) > dim_cap:
            raise CapExceeded(f"component kernel dimension {max(dims)} exceeds cap {dim_cap}")
    best: dict[str, tuple[int, BinaryVector]] = {}
    for comp in comps:
        c = comp.code
        for side, (hc, ho) in (("z", (c.h_x, c.h_z)), ("x", (c.h_z, c.h_x))):
            stabs, logicals, _ = _side_pieces(hc, ho)
            if len(logicals) == 0:
                continue
            w, vec = min_coset_weight(stabs, logicals)
            if side not in best or w < best[side][0]:
                local = BinaryVector(c.n, vec).to_dense()
                full = np.zeros(code.n, dtype=np.uint8)
                full[comp.qubits] = local
                best[side] = (w, BinaryVector.from_dense(full))
    if not best:
        raise NoLogicals("code has k = 0")
    return _combine(best, "exact")


def _combine(best: dict[str, tuple[int, BinaryVector]], certainty) -> DistanceResult:
    sides = sorted(best, key=lambda s: (best[s][0], s != "z"))
    first = sides[0]
    tie = len(sides) == 2 and best["x"][0] == best["z"][0]
    return DistanceResult(best[first][0], certainty, best[first][1], "both" if tie else first)


def _logical_filter(h_other: BinaryMatrix, dual_logicals: np.ndarray):
    """Predicate on packed rows of ker(h_check): True where outside rs(h_other).

    A kernel vector lies in rs(h_other) iff it is orthogonal to every dual
    logical, so one parity test per dual logical suffices.
    """
    def outside(rows: np.ndarray) -> np.ndarray:
        par = np.bitwise_count(rows[:, None, :] & dual_logicals[None, :, :]).sum(axis=2) & 1
        return par.any(axis=1)

    return outside


def _search_side(h_check: BinaryMatrix, h_other: BinaryMatrix, trials: int,
                 rng: np.random.Generator) -> tuple[int, np.ndarray] | None:
    n = h_check.cols
    kernel = gf2.kernel_basis(h_check)
    dual = gf2.independent_modulo(gf2.kernel_basis(h_other), h_check).data
    if len(dual) == 0:
        return None
    outside = _logical_filter(h_other, dual)

    def best_of(rows: np.ndarray, best):
        mask = outside(rows)
        if not mask.any():
            return best
        cand = rows[mask]
        w = _weights(cand)
        i = int(np.argmin(w))
        if best is None or w[i] < best[0]:
            return int(w[i]), cand[i].copy()
        return best

    best = best_of(kernel.data, None)
    dim = kernel.rows
    iu, ju = np.triu_indices(dim, 1)
    for _ in range(trials):
        order = rng.permutation(n)
        data, _ = _rref(kernel.data.copy(), n, order=order)
        best = best_of(data, best)
        # weight-2 combinations of the reduced rows (Lee-Brickell p = 2)
        best = best_of(data[iu] ^ data[ju], best)
    return best


def distance_upper_bound(code: CssCode, trials: int = 2000, rng_seed: int | None = 0) -> DistanceResult:
    """Randomized information-set search for low-weight logicals on both sides."""
    rng = np.random.default_rng(rng_seed)
    best = {}
    for side, (hc, ho) in (("z", (code.h_x, code.h_z)), ("x", (code.h_z, code.h_x))):
        found = _search_side(hc, ho, trials, rng)
        if found is not None:
            best[side] = (found[0], BinaryVector(code.n, found[1]))
    if not best:
        raise NoLogicals("code has k = 0")
    return _combine(best, "upper_bound")


def verify_witness(code: CssCode, result: DistanceResult) -> bool:
    """Witness is a nontrivial logical of the reported side with the reported weight."""
    w = result.witness
    if w.weight() != result.value:
        return False
    sides = ["z", "x"] if result.side == "both" else [result.side]
    for side in sides:
        hc, ho = (code.h_x, code.h_z) if side == "z" else (code.h_z, code.h_x)
        if (hc @ w).is_zero() and not gf2.row_space_contains(ho, w):
            return True
    return False


def distance(code: CssCode, dim_cap: int = 24, trials: int = 2000, seed: int | None = 0) -> DistanceResult:
    """Exact when every component fits under the cap, otherwise an upper bound."""
    try:
        return exact_distance(code, dim_cap)
    except CapExceeded:
        return distance_upper_bound(code, trials, seed)
