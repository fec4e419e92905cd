"""Syndrome decoders: belief propagation, ordered-statistics post-processing,
and an exhaustive minimum-weight decoder for small instances.

Everything works on dense ``uint8`` arrays internally; ``BinaryMatrix`` and
``BinaryVector`` inputs are accepted and unpacked.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, product
from typing import Literal

import numpy as np
from scipy.sparse import csr_matrix

from .gf2_core import BinaryMatrix, BinaryVector, _bit, _pack, _rref, _unpack

LLR_CLAMP = 30.0


class InconsistentSyndrome(ValueError):
    """No error pattern produces this syndrome."""


@dataclass(frozen=True)
class DecoderConfig:
    bp_variant: Literal["sum_product", "min_sum"] = "sum_product"
    max_iterations: int = 100
    min_sum_scale: float = 1.0
    osd_order: int = 4

    def __post_init__(self) -> None:
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")
        if not 0 < self.min_sum_scale <= 1:
            raise ValueError("min_sum_scale must lie in (0, 1]")
        if self.osd_order < 0:
            raise ValueError("osd_order must be non-negative")
        if self.bp_variant not in ("sum_product", "min_sum"):
            raise ValueError(f"unknown BP variant {self.bp_variant!r}")


@dataclass(frozen=True)
class DecodeOutcome:
    estimate: np.ndarray
    bp_converged: bool
    iterations_used: int


def _dense(x) -> np.ndarray:
    if isinstance(x, (BinaryMatrix, BinaryVector)):
        return x.to_dense()
    return np.asarray(x, dtype=np.uint8)


class _Graph:
    """Edge lists of a check matrix, sorted by check."""

    def __init__(self, H: np.ndarray) -> None:
        self.H = H
        self.m, self.n = H.shape
        self.chk, self.var = np.nonzero(H)
        edges = self.chk.size
        self.starts = np.flatnonzero(np.r_[True, self.chk[1:] != self.chk[:-1]]) if edges else np.zeros(0, int)
        # segment index of each edge among the checks that have edges
        self.seg = np.cumsum(np.r_[0, self.chk[1:] != self.chk[:-1]]) if edges else np.zeros(0, int)
        self.Hi = H.astype(np.int64)
        self.incidence_t = csr_matrix((np.ones(edges), (self.var, np.arange(edges))), shape=(self.n, edges))

    def var_sums(self, r: np.ndarray) -> np.ndarray:
        return (self.incidence_t @ r.T).T

    def syndromes(self, e: np.ndarray) -> np.ndarray:
        return (e.astype(np.int64) @ self.Hi.T & 1).astype(np.uint8)


def _check_messages(g: _Graph, q: np.ndarray, sign_s: np.ndarray, variant: str, scale: float) -> np.ndarray:
    """Check-to-variable messages for a batch; ``q`` has shape (batch, edges)."""
    neg = (q < 0).astype(np.int64)
    parity = (np.add.reduceat(neg, g.starts, axis=1)[:, g.seg] - neg) & 1
    sign = sign_s[:, g.chk] * (1 - 2 * parity)
    mag = np.abs(q)
    if variant == "min_sum":
        min1 = np.minimum.reduceat(mag, g.starts, axis=1)
        is_min = mag == min1[:, g.seg]
        ties = np.add.reduceat(is_min.astype(np.int64), g.starts, axis=1) > 1
        min2 = np.minimum.reduceat(np.where(is_min, np.inf, mag), g.starts, axis=1)
        min2 = np.where(ties, min1, min2)
        other = np.where(is_min, min2[:, g.seg], min1[:, g.seg])
        return np.clip(scale * sign * other, -LLR_CLAMP, LLR_CLAMP)
    logt = np.log(np.maximum(np.tanh(mag / 2), 1e-300))
    tot = np.add.reduceat(logt, g.starts, axis=1)
    prod_excl = np.minimum(np.exp(tot[:, g.seg] - logt), 1 - 1e-15)
    return np.clip(sign * 2 * np.arctanh(prod_excl), -LLR_CLAMP, LLR_CLAMP)


def _bp(g: _Graph, S: np.ndarray, prior: np.ndarray, cfg: DecoderConfig):
    """Batched flooding BP. ``S`` has shape (batch, m).

    Returns posterior LLRs, hard decisions, convergence flags and iteration
    counts, all per batch row. Converged rows are frozen and dropped from
    further sweeps.
    """
    batch = S.shape[0]
    llr0 = np.clip(np.log((1 - prior) / prior), -LLR_CLAMP, LLR_CLAMP)
    post = np.tile(llr0, (batch, 1))
    hard = np.zeros((batch, g.n), dtype=np.uint8)
    done = np.zeros(batch, dtype=bool)
    iters = np.full(batch, cfg.max_iterations)
    if g.chk.size == 0:
        return post, hard, ~S.any(axis=1), np.ones(batch, int)
    active = np.arange(batch)
    sign_s = 1.0 - 2.0 * S.astype(np.float64)
    q = np.tile(llr0[g.var], (batch, 1))
    for it in range(1, cfg.max_iterations + 1):
        r = _check_messages(g, q, sign_s[active], cfg.bp_variant, cfg.min_sum_scale)
        p = llr0 + g.var_sums(r)
        h = (p < 0).astype(np.uint8)
        ok = (g.syndromes(h) == S[active]).all(axis=1)
        post[active], hard[active] = p, h
        if ok.any():
            fin = active[ok]
            done[fin], iters[fin] = True, it
            active, q, r, p = active[~ok], q[~ok], r[~ok], p[~ok]
            if active.size == 0:
                break
        q = np.clip(p[:, g.var] - r, -LLR_CLAMP, LLR_CLAMP)
    return post, hard, done, iters


def _prior_vector(prior, n: int) -> np.ndarray:
    prior = np.broadcast_to(np.asarray(prior, dtype=np.float64), (n,)).copy()
    if np.any(prior <= 0) or np.any(prior >= 1):
        raise ValueError("priors must lie strictly between 0 and 1")
    return prior


def bp_decode(H, s, prior, cfg: DecoderConfig = DecoderConfig()):
    """Flooding-schedule BP conditioned on syndrome ``s``.

    Returns ``(marginals, hard_decision, converged)``; marginals are posterior
    error probabilities.
    """
    H, s = _dense(H), _dense(s)
    if s.shape != (H.shape[0],):
        raise ValueError("syndrome length does not match check count")
    post, hard, ok, _ = _bp(_Graph(H), s[None, :], _prior_vector(prior, H.shape[1]), cfg)
    return 1 / (1 + np.exp(post[0])), hard[0], bool(ok[0])


def _osd(H: np.ndarray, s: np.ndarray, probs: np.ndarray, order: int, hint: np.ndarray | None = None) -> np.ndarray:
    m, n = H.shape
    ranking = np.argsort(-probs, kind="stable")
    aug = _pack(np.hstack([H, s[:, None]]))
    data, pivots = _rref(aug, n + 1, order=ranking)
    r = len(pivots)
    if _bit(data[r:], n).any():
        raise InconsistentSyndrome("syndrome is not in the column space of H")
    red = _unpack(data[:r], n + 1)
    pivot_set = set(pivots)
    free = [c for c in ranking if c not in pivot_set][:order]
    p = np.clip(probs, 1e-300, 1 - 1e-16)
    cost_vec = np.log1p(-p) - np.log(p)
    assign = np.array(list(product((0, 1), repeat=len(free))), dtype=np.uint8).reshape(1 << len(free), len(free))
    piv_bits = (red[:, n][None, :] + assign.astype(np.int64) @ red[:, free].T.astype(np.int64)) & 1
    cands = np.zeros((len(assign), n), dtype=np.uint8)
    cands[:, pivots] = piv_bits
    cands[:, free] = assign
    if hint is not None:
        cands = np.vstack([hint[None, :], cands])
    costs = cands @ cost_vec
    weights = cands.sum(axis=1)
    best = np.lexsort((np.arange(len(cands)), weights, costs))[0]
    return cands[best]


def osd_postprocess(H, s, marginals, osd_order: int = 4) -> np.ndarray:
    """Ordered-statistics decoding from BP marginals; always satisfies ``H e = s``.

    Columns are ranked by error probability, an information set is taken
    greedily along that ranking, and all ``2^osd_order`` assignments to the
    most error-prone non-pivot columns are solved for. The candidate with the
    smallest soft weight ``sum log((1-p)/p)`` wins (ties: Hamming weight, then
    enumeration order). The BP hard decision competes if it already matches.
    """
    H, s = _dense(H), _dense(s)
    probs = np.asarray(marginals, dtype=np.float64)
    hint = (probs > 0.5).astype(np.uint8)
    if not np.array_equal((H.astype(np.int64) @ hint) & 1, s):
        hint = None
    return _osd(H, s, probs, osd_order, hint)


class BpOsdDecoder:
    """BP with OSD fallback for a fixed check matrix and prior."""

    def __init__(self, H, prior, cfg: DecoderConfig = DecoderConfig()) -> None:
        self.H = _dense(H)
        self.graph = _Graph(self.H)
        self.prior = _prior_vector(prior, self.H.shape[1])
        self.cfg = cfg

    def decode_outcomes(self, S: np.ndarray) -> list[DecodeOutcome]:
        S = np.atleast_2d(_dense(S))
        post, hard, ok, iters = _bp(self.graph, S, self.prior, self.cfg)
        out = []
        for row in range(S.shape[0]):
            if ok[row]:
                out.append(DecodeOutcome(hard[row], True, int(iters[row])))
            else:
                est = _osd(self.H, S[row], 1 / (1 + np.exp(post[row])), self.cfg.osd_order)
                out.append(DecodeOutcome(est, False, int(iters[row])))
        return out

    def decode_outcome(self, s) -> DecodeOutcome:
        return self.decode_outcomes(_dense(s)[None, :])[0]

    def decode_batch(self, S: np.ndarray) -> np.ndarray:
        S = np.atleast_2d(S)
        if S.shape[0] == 0:
            return np.zeros((0, self.H.shape[1]), dtype=np.uint8)
        return np.array([o.estimate for o in self.decode_outcomes(S)], dtype=np.uint8)

    def decode(self, s) -> np.ndarray:
        return self.decode_outcome(s).estimate


def oracle_min_weight_decode(H, s, w_max: int) -> np.ndarray | None:
    """First error of weight 0..w_max (lexicographic supports) matching ``s``.

    Returns None when no error of weight at most ``w_max`` fits.
    """
    H, s = _dense(H), _dense(s)
    n = H.shape[1]
    if not s.any():
        return np.zeros(n, dtype=np.uint8)
    cols = [int.from_bytes(np.packbits(H[:, j], bitorder="little").tobytes(), "little") for j in range(n)]
    target = int.from_bytes(np.packbits(s, bitorder="little").tobytes(), "little")
    for w in range(1, w_max + 1):
        for supp in combinations(range(n), w):
            acc = 0
            for j in supp:
                acc ^= cols[j]
            if acc == target:
                e = np.zeros(n, dtype=np.uint8)
                e[list(supp)] = 1
                return e
    return None


class OracleDecoder:
    """Lookup table of minimum-weight corrections up to ``w_max``.

    Entries agree with :func:`oracle_min_weight_decode`. Syndromes outside the
    table decode to the zero correction, which the simulator then counts as a
    failure.
    """

    def __init__(self, H, w_max: int) -> None:
        self.H = _dense(H)
        self.w_max = w_max
        m, n = self.H.shape
        self.table: dict[bytes, tuple[int, ...]] = {bytes(m): ()}
        for w in range(1, w_max + 1):
            for supp in combinations(range(n), w):
                key = np.bitwise_xor.reduce(self.H[:, supp], axis=1).tobytes()
                self.table.setdefault(key, supp)

    def decode(self, s) -> np.ndarray:
        e = np.zeros(self.H.shape[1], dtype=np.uint8)
        supp = self.table.get(_dense(s).tobytes())
        if supp:
            e[list(supp)] = 1
        return e

    def decode_batch(self, S: np.ndarray) -> np.ndarray:
        S = np.atleast_2d(S)
        out = np.zeros((S.shape[0], self.H.shape[1]), dtype=np.uint8)
        for row, s in enumerate(S):
            out[row] = self.decode(s)
        return out


@dataclass(frozen=True)
class OracleConfig:
    """Selects the exhaustive minimum-weight decoder."""

    w_max: int = 2


def make_decoder(H, prior, config: DecoderConfig | OracleConfig):
    """Instantiate the decoder a config describes for check matrix ``H``."""
    if isinstance(config, OracleConfig):
        return OracleDecoder(H, config.w_max)
    return BpOsdDecoder(H, prior, config)
