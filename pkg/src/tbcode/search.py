"""Enumeration and screening of code specifications.

Specs in a box ``(l, m, |A|, |B|)`` are generated from a monomial universe,
deduplicated up to term order and the X/Z swap ``(A, B) -> (B^T, A^T)``, and
pushed through a cheap-to-expensive cascade: build and k, component count,
distance, toric layout.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterator

from .code_builder import CodeSpec, Monomial, build_code, split_components
from .distance import DistanceResult, NoLogicals, distance
from .tanner_layout import toric_layout_check


@dataclass(frozen=True)
class SearchQuery:
    l_range: tuple[int, ...]
    m_range: tuple[int, ...]
    weight_pattern: tuple[int, int]
    min_k: int = 1
    min_d: int = 0
    require_toric: bool = False
    require_connected: bool = False
    exponent_universe: frozenset[str] = frozenset("xyz")

    def __post_init__(self) -> None:
        if not self.l_range or not self.m_range:
            raise ValueError("l and m ranges must be nonempty")
        if min(self.weight_pattern) < 1:
            raise ValueError("|A| and |B| must be at least 1")
        if not set(self.exponent_universe) <= set("xyz"):
            raise ValueError("universe may only contain x, y, z")


@dataclass(frozen=True)
class Budget:
    """How hard to look for the distance."""

    dim_cap: int = 24
    trials: int = 2000
    seed: int = 0


@dataclass
class SearchRecord:
    index: int
    spec: CodeSpec
    n: int
    k: int
    d: DistanceResult | None = None
    toric: tuple[int, ...] | None = None
    components: int | None = None
    passed: bool = False
    # first cascade stage that rejected the spec, or "" when it passed
    rejected_at: str = ""

    def to_dict(self) -> dict:
        return {
            "index": self.index,
            "spec": self.spec.to_text(),
            "n": self.n,
            "k": self.k,
            "d": self.d.to_dict() if self.d else None,
            "toric": list(self.toric) if self.toric else None,
            "components": self.components,
            "passed": self.passed,
            "rejected_at": self.rejected_at,
        }


def monomial_universe(l: int, m: int, variables=frozenset("xyz")) -> list[Monomial]:
    """``1`` plus all nontrivial powers of the chosen variables, canonical and
    deduplicated in first-appearance order."""
    raw = [Monomial(0, 0)]
    if "x" in variables:
        raw += [Monomial.of("x", e, l, m) for e in range(1, l)]
    if "y" in variables:
        raw += [Monomial.of("y", e, l, m) for e in range(1, m)]
    if "z" in variables:
        raw += [Monomial.of("z", e, l, m) for e in range(1, math.lcm(l, m))]
    return list(dict.fromkeys(raw))


def _swap_key(a: tuple[Monomial, ...], b: tuple[Monomial, ...], l: int, m: int):
    inv = lambda ts: tuple(sorted(t.inverse(l, m) for t in ts))
    return inv(b), inv(a)


def enumerate_specs(q: SearchQuery, start: int = 0) -> Iterator[tuple[int, CodeSpec]]:
    """Stream ``(index, spec)`` over the query box; ``start`` resumes a run.

    Indices count emitted specs, so they are stable across runs of the same
    query.
    """
    wa, wb = q.weight_pattern
    index = 0
    for l in q.l_range:
        for m in q.m_range:
            universe = sorted(monomial_universe(l, m, q.exponent_universe))
            for a in combinations(universe, wa):
                for b in combinations(universe, wb):
                    if wa + wb < 2:
                        continue
                    if wa == wb and _swap_key(a, b, l, m) < (a, b):
                        continue
                    if index >= start:
                        yield index, CodeSpec(l, m, a, b)
                    index += 1


def evaluate_spec(spec: CodeSpec, budget: Budget = Budget(), query: SearchQuery | None = None,
                  index: int = -1) -> SearchRecord:
    """Run the screening cascade, stopping at the first failed filter."""
    min_k = query.min_k if query else 1
    code = build_code(spec, with_logicals=False)
    rec = SearchRecord(index, spec, code.n, code.k)
    if code.k < max(min_k, 1):
        rec.rejected_at = "k"
        return rec
    rec.components = len(split_components(code))
    if query and query.require_connected and rec.components > 1:
        rec.rejected_at = "components"
        return rec
    try:
        rec.d = distance(code, budget.dim_cap, budget.trials, budget.seed)
    except NoLogicals:
        rec.rejected_at = "k"
        return rec
    if query and rec.d.value < query.min_d:
        rec.rejected_at = "distance"
        return rec
    rec.toric = toric_layout_check(code)
    if query and query.require_toric and rec.toric is None:
        rec.rejected_at = "toric"
        return rec
    rec.passed = True
    return rec


def _evaluate_indexed(args) -> SearchRecord:
    index, spec, budget, query = args
    return evaluate_spec(spec, budget, query, index)


def run_search(q: SearchQuery, budget: Budget = Budget(), start: int = 0,
               workers: int = 1, chunk: int = 8) -> Iterator[SearchRecord]:
    """Evaluate every spec in the box, yielding records in index order."""
    jobs = ((i, s, budget, q) for i, s in enumerate_specs(q, start))
    if workers <= 1:
        yield from map(_evaluate_indexed, jobs)
        return
    with ProcessPoolExecutor(workers) as pool:
        yield from pool.map(_evaluate_indexed, jobs, chunksize=chunk)
