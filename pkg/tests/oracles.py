"""Brute-force reference computations on explicit word lists.

Nothing here uses the trellis, chain or encoder machinery; every value is
recomputed from codewords and componentwise products alone.
"""

from __future__ import annotations

import numpy as np
from hypothesis import strategies as st

from groupsys.algebra import builtin_group
from groupsys.system import BlockCode, close_words


def words(code: BlockCode) -> list[tuple[int, ...]]:
    return [tuple(int(x) for x in w) for w in code.words]


def support(w) -> tuple[int, int] | None:
    nz = [i for i, x in enumerate(w) if x]
    return (nz[0], nz[-1]) if nz else None


def inside(w, lo: int, hi: int) -> bool:
    s = support(w)
    return s is None or (lo <= s[0] and s[1] <= hi)


def closure(code: BlockCode, gens) -> set:
    return set(close_words(code.alphabets, list(gens)))


def product_set(code: BlockCode, A, B) -> set:
    return {code.multiply_words(a, b) for a in A for b in B}


def ell_oracle(code: BlockCode) -> int:
    """Least m such that words spanning at most m+1 times generate the code."""
    W = words(code)
    for m in range(code.length):
        short = [w for w in W if support(w) is None or support(w)[1] - support(w)[0] <= m]
        if len(closure(code, short)) == code.size:
            return m
    raise AssertionError("code not generated by its own words")


def span_subcode(code: BlockCode, m: int) -> set:
    """Closure of the words spanning at most m+1 times (m < 0: identity)."""
    if m < 0:
        return {(0,) * code.length}
    W = words(code)
    return closure(code, [w for w in W if support(w) is not None and support(w)[1] - support(w)[0] <= m])


def state_profile(code: BlockCode) -> list[int]:
    W = words(code)
    out = []
    for t in range(code.length + 1):
        past = [w for w in W if inside(w, 0, t - 1)]
        fut = [w for w in W if inside(w, t, code.length - 1)]
        out.append(code.size // (len(past) * len(fut)))
    return out


def branch_orders(code: BlockCode) -> list[int]:
    """Distinct (state, symbol, next state) triples, states as cosets of
    past * future words."""
    W = words(code)
    L = code.length

    def state_key(t):
        past = [w for w in W if inside(w, 0, t - 1)]
        fut = [w for w in W if inside(w, t, L - 1)]
        pf = product_set(code, past, fut)
        return {w: frozenset(code.multiply_words(w, x) for x in pf) for w in W}

    keys = [state_key(t) for t in range(L + 1)]
    return [len({(keys[t][w], w[t], keys[t + 1][w]) for w in W}) for t in range(L)]


def granule_order(code: BlockCode, t: int, k: int) -> int:
    W = words(code)
    top = [w for w in W if inside(w, t, t + k)]
    a = [w for w in W if inside(w, t, t + k - 1)]
    b = [w for w in W if inside(w, t + 1, t + k)]
    return len(top) // len(product_set(code, a, b))


def elementary_abelian_2(table) -> bool:
    T = np.asarray(table)
    return bool(np.array_equal(T, T.T) and (np.diag(T) == 0).all())


# random small codes

ALPHABETS = ("Z2", "Z3", "V4", "S3")


@st.composite
def small_codes(draw, max_size: int = 64):
    name = draw(st.sampled_from(ALPHABETS))
    G = builtin_group(name)
    L = draw(st.integers(2, 4 if G.order <= 3 else 3))
    n = draw(st.integers(1, 3))
    gens = [tuple(draw(st.integers(0, G.order - 1)) for _ in range(L)) for _ in range(n)]
    ws = close_words([G] * L, gens)
    if len(ws) > max_size:
        ws = close_words([G] * L, gens[:1])
    return BlockCode(f"rand{name}", [G] * L, ws)
