"""Slow, independent reference implementations used to check the package.

Vectors are Python ints (bit j = coordinate j); nothing here touches the
package's packed-word code.
"""

from itertools import combinations

import numpy as np


def rows_as_ints(dense) -> list[int]:
    return [sum(1 << j for j, b in enumerate(row) if b) for row in np.asarray(dense)]


def cols_as_ints(dense) -> list[int]:
    return rows_as_ints(np.asarray(dense).T)


def rank(rows: list[int]) -> int:
    basis: dict[int, int] = {}
    for r in rows:
        while r:
            top = r.bit_length() - 1
            if top not in basis:
                basis[top] = r
                break
            r ^= basis[top]
    return len(basis)


def span(rows: list[int]) -> set[int]:
    out = {0}
    for r in rows:
        out |= {v ^ r for v in out}
    return out


def in_span(rows: list[int], v: int) -> bool:
    return rank(rows + [v]) == rank(rows)


def kernel_dim(dense) -> int:
    dense = np.asarray(dense)
    return dense.shape[1] - rank(rows_as_ints(dense))


def popcount(v: int) -> int:
    return bin(v).count("1")


def brute_distance_side(h_check, h_stab, limit: int) -> int | None:
    """Smallest weight of a vector in ker(h_check) outside rs(h_stab), up to ``limit``."""
    cols = cols_as_ints(h_check)
    stab = rows_as_ints(h_stab)
    r0 = rank(stab)
    n = len(cols)
    for w in range(1, limit + 1):
        for supp in combinations(range(n), w):
            s = 0
            for j in supp:
                s ^= cols[j]
            if s:
                continue
            v = sum(1 << j for j in supp)
            if rank(stab + [v]) > r0:
                return w
    return None


def brute_distance(h_x, h_z, limit: int) -> int | None:
    found = [d for d in (brute_distance_side(h_x, h_z, limit), brute_distance_side(h_z, h_x, limit)) if d]
    return min(found) if found else None


def monomial_dense(ex: int, ey: int, l: int, m: int) -> np.ndarray:
    """x^ex y^ey built as a Kronecker product of cyclic shifts."""
    sl = np.roll(np.eye(l, dtype=np.int64), 1, axis=1)
    sm = np.roll(np.eye(m, dtype=np.int64), 1, axis=1)
    return np.kron(np.linalg.matrix_power(sl, ex), np.linalg.matrix_power(sm, ey)) % 2
