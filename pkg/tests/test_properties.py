"""Standalone property suites: ``pytest tests/test_properties.py``."""

from functools import lru_cache

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

import oracles
from tbcode import gf2_core as gf2
from tbcode.code_builder import (CodeSpec, Monomial, build_code, monomial_matrix, parse_spec,
                                 polynomial_matrix)
from tbcode.decoder import DecoderConfig
from tbcode.gf2_core import BinaryMatrix, BinaryVector
from tbcode.search import Budget, SearchQuery, enumerate_specs, run_search
from tbcode.simulator import StopRule, block_rng, monte_carlo
from tbcode.tanner_layout import build_tanner, build_toric_layout, toric_layout_tuples

matrices = st.tuples(st.integers(1, 12), st.integers(1, 40)).flatmap(
    lambda s: arrays(np.uint8, s, elements=st.integers(0, 1)))


# --- GF(2) against brute force ---------------------------------------------------


@given(matrices)
def test_rank_and_kernel_against_brute_force(dense):
    M = BinaryMatrix.from_dense(dense)
    r = oracles.rank(oracles.rows_as_ints(dense))
    assert gf2.rank(M) == r
    assert gf2.kernel_basis(M).rows == dense.shape[1] - r


@given(matrices, st.data())
def test_row_space_against_enumeration(dense, data):
    v = data.draw(arrays(np.uint8, dense.shape[1], elements=st.integers(0, 1)))
    expected = oracles.rows_as_ints(v[None, :])[0] in oracles.span(oracles.rows_as_ints(dense))
    assert gf2.row_space_contains(BinaryMatrix.from_dense(dense), BinaryVector.from_dense(v)) == expected


# --- monomial matrices -----------------------------------------------------------


@st.composite
def group_and_elements(draw):
    l, m = draw(st.integers(1, 8)), draw(st.integers(1, 8))
    mono = st.builds(Monomial, st.integers(0, l - 1), st.integers(0, m - 1))
    return l, m, draw(mono), draw(mono), draw(st.lists(mono, min_size=1, max_size=4, unique=True))


@given(group_and_elements())
def test_monomial_homomorphism_and_commutation(args):
    l, m, s, t, terms = args
    Ms, Mt = monomial_matrix(s, l, m), monomial_matrix(t, l, m)
    assert Ms @ Mt == monomial_matrix(s.mul(t, l, m), l, m) == Mt @ Ms
    assert Ms.T == monomial_matrix(s.inverse(l, m), l, m)
    P, D = polynomial_matrix(terms, l, m).astype(int), Ms.to_dense().astype(int)
    assert np.array_equal(P @ D % 2, D @ P % 2)
    assert np.array_equal(Ms.to_dense(), oracles.monomial_dense(s.ex, s.ey, l, m))


# --- toric layouts ---------------------------------------------------------------


@lru_cache(maxsize=None)
def toric_pool() -> tuple[CodeSpec, ...]:
    pool = []
    for pattern in ((2, 2), (2, 3), (3, 3)):
        found = 0
        for i, spec in enumerate_specs(SearchQuery((2, 3, 4, 5), (2, 3, 4), pattern)):
            if i % 37 == 0 and toric_layout_tuples(build_code(spec, with_logicals=False)):
                pool.append(spec)
                found += 1
                if found == 40:
                    break
    return tuple(pool)


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_every_layout_edge_is_translation_invariant(data):
    spec = data.draw(st.sampled_from(toric_pool()))
    code = build_code(spec, with_logicals=False)
    t = data.draw(st.sampled_from(toric_layout_tuples(code)))
    layout = build_toric_layout(code, *t[:4])
    graph = build_tanner(code)
    assert len(layout.unit_edges) + len(layout.long_edges) == len(graph.edges)
    vectors = {}
    for c, d, origin in graph.edges:
        cv, dv = graph.vertices[c], graph.vertices[d]
        vectors.setdefault((cv[0], origin), set()).add(layout.vector(cv, dv))
    assert all(len(v) == 1 for v in vectors.values())
    # shifting every label by p moves every vertex by (2, 0) on the torus
    l, m = spec.l, spec.m
    ai, aj = spec.a_terms[t[0] - 1], spec.a_terms[t[1] - 1]
    p = ai.mul(aj.inverse(l, m), l, m)
    for (kind, label), (x, y) in layout.coords.items():
        assert layout.coords[(kind, label.mul(p, l, m))] == ((x + 2) % (2 * layout.mu), y)


# --- RNG determinism -------------------------------------------------------------


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(0, 7), st.integers(0, 50))
def test_block_streams_depend_only_on_their_key(seed, p_index, block):
    a = block_rng(seed, p_index, block).random(8)
    b = block_rng(seed, p_index, block).random(8)
    c = block_rng(seed, p_index, block + 1).random(8)
    assert np.array_equal(a, b) and not np.array_equal(a, c)


def test_monte_carlo_counts_do_not_depend_on_worker_count():
    code = build_code(parse_spec("l=3 m=5 A=x+z^4 B=x+y^2+z^2"), with_logicals=False)
    stop = StopRule(max_shots=12_000, target_failures=25)
    runs = [monte_carlo(code, DecoderConfig(), [0.04, 0.08], stop, seed=123, workers=w) for w in (1, 2, 3)]
    assert runs[0] == runs[1] == runs[2]


def test_search_output_does_not_depend_on_worker_count():
    q = SearchQuery((3,), (2, 3), (2, 2))
    one = [r.to_dict() for r in run_search(q, Budget(trials=10), workers=1)]
    three = [r.to_dict() for r in run_search(q, Budget(trials=10), workers=3, chunk=2)]
    assert one == three
