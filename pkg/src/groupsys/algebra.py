"""Finite groups given by dense operation tables.

Every group keeps its identity at index 0.  Subsets are `ElementSet` values
(sorted member tuples tied to a parent group).  Quotients label cosets by
their least member, transversals pick the least member of each coset, so all
derived structures are deterministic.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Iterable, Hashable, Sequence

import numpy as np

from .errors import (
    FormatError,
    InvalidChain,
    MissingInverse,
    NoIdentityAtZero,
    NotAssociative,
    NotNested,
    NotNormal,
    NotSubgroup,
    ParentMismatch,
)

MAX_ORDER = 4096
# Above this order associativity is checked with Light's test over a
# generating set instead of all n^3 triples.  Both are exact.
BRUTE_FORCE_LIMIT = 256


class FiniteGroup:
    """A validated finite group.  Build instances with `validate_group`."""

    __slots__ = ("name", "table", "inverse")

    def __init__(self, table: np.ndarray, inverse: np.ndarray, name: str):
        self.table = table
        self.inverse = inverse
        self.name = name

    @property
    def order(self) -> int:
        return self.table.shape[0]

    def __len__(self) -> int:
        return self.order

    def mul(self, a: int, b: int) -> int:
        return int(self.table[a, b])

    def inv(self, a: int) -> int:
        return int(self.inverse[a])

    def product(self, items: Iterable[int]) -> int:
        acc = 0
        for x in items:
            acc = int(self.table[acc, x])
        return acc

    def whole(self) -> "ElementSet":
        return ElementSet(self, tuple(range(self.order)))

    def trivial(self) -> "ElementSet":
        return ElementSet(self, (0,))

    def subset(self, members: Iterable[int]) -> "ElementSet":
        return ElementSet.of(self, members)

    def is_abelian(self) -> bool:
        return bool(np.array_equal(self.table, self.table.T))

    def same_table(self, other: "FiniteGroup") -> bool:
        return self.order == other.order and bool(np.array_equal(self.table, other.table))

    def __repr__(self) -> str:
        return f"FiniteGroup({self.name!r}, order={self.order})"


def _light_generators(table: np.ndarray) -> list[int]:
    """Greedy generating set: add the least element outside the current closure."""
    n = table.shape[0]
    inside = np.zeros(n, dtype=bool)
    inside[0] = True
    gens: list[int] = []
    while not inside.all():
        g = int(np.argmin(inside))
        gens.append(g)
        inside[g] = True
        # left-normed words in the generators; once they cover every element
        # the generators certainly generate the table
        members = np.flatnonzero(inside)
        while True:
            prods = np.unique(table[np.ix_(members, np.array(gens))])
            new = prods[~inside[prods]]
            if new.size == 0:
                break
            inside[new] = True
            members = np.flatnonzero(inside)
    return gens


def _find_nonassociative(table: np.ndarray) -> tuple[int, int, int] | None:
    n = table.shape[0]
    if n <= BRUTE_FORCE_LIMIT:
        for a in range(n):
            left = table[table[a]]          # (ab)c over all b, c
            right = table[a][table]         # a(bc) over all b, c
            bad = np.argwhere(left != right)
            if bad.size:
                b, c = bad[0]
                return a, int(b), int(c)
        return None
    for s in _light_generators(table):
        left = table[table[:, s]]           # (xs)y
        right = table[:, table[s]]          # x(sy)
        bad = np.argwhere(left != right)
        if bad.size:
            x, y = bad[0]
            return int(x), s, int(y)
    return None


def validate_group(table, name: str = "G") -> FiniteGroup:
    """Check the group axioms on an explicit table and return the group."""
    arr = np.array(table, dtype=np.int64)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] == 0:
        raise FormatError(f"group {name}: table must be a nonempty square array")
    n = arr.shape[0]
    if n > MAX_ORDER:
        raise FormatError(f"group {name}: order {n} exceeds {MAX_ORDER}")
    if arr.min() < 0 or arr.max() >= n:
        raise FormatError(f"group {name}: entries must lie in 0..{n - 1}")
    ids = np.arange(n)
    if not np.array_equal(arr[0], ids):
        a = int(np.argmax(arr[0] != ids))
        raise NoIdentityAtZero(f"group {name}: 0*{a} = {int(arr[0, a])}, expected {a}")
    if not np.array_equal(arr[:, 0], ids):
        a = int(np.argmax(arr[:, 0] != ids))
        raise NoIdentityAtZero(f"group {name}: {a}*0 = {int(arr[a, 0])}, expected {a}")
    srt = np.sort(arr, axis=1)
    bad_rows = np.flatnonzero((srt != ids).any(axis=1))
    if bad_rows.size:
        raise MissingInverse(f"group {name}: row of element {int(bad_rows[0])} is not a permutation")
    srt = np.sort(arr, axis=0)
    bad_cols = np.flatnonzero((srt != ids[:, None]).any(axis=0))
    if bad_cols.size:
        raise MissingInverse(f"group {name}: column of element {int(bad_cols[0])} is not a permutation")
    triple = _find_nonassociative(arr)
    if triple is not None:
        a, b, c = triple
        raise NotAssociative(f"group {name}: ({a}*{b})*{c} != {a}*({b}*{c})")
    inverse = np.argmin(arr, axis=1)  # position of the 0 entry in each row
    arr.setflags(write=False)
    inverse.setflags(write=False)
    return FiniteGroup(arr, inverse, name)


@dataclass(frozen=True, eq=False)
class ElementSet:
    """A subset of a group, stored as a strictly increasing member tuple."""

    parent: FiniteGroup
    members: tuple[int, ...]

    @staticmethod
    def of(parent: FiniteGroup, members: Iterable[int]) -> "ElementSet":
        ms = tuple(sorted({int(m) for m in members}))
        if ms and (ms[0] < 0 or ms[-1] >= parent.order):
            raise ValueError(f"element outside 0..{parent.order - 1}")
        return ElementSet(parent, ms)

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def __contains__(self, x) -> bool:
        return int(x) in self._lookup

    @property
    def _lookup(self) -> frozenset:
        cached = self.__dict__.get("_lookup_cache")
        if cached is None:
            cached = frozenset(self.members)
            object.__setattr__(self, "_lookup_cache", cached)
        return cached

    @property
    def array(self) -> np.ndarray:
        return np.array(self.members, dtype=np.int64)

    def mask(self) -> np.ndarray:
        m = np.zeros(self.parent.order, dtype=bool)
        m[list(self.members)] = True
        return m

    def issubset(self, other: "ElementSet") -> bool:
        _same_parent(self, other)
        return self._lookup <= other._lookup

    def __eq__(self, other) -> bool:
        if not isinstance(other, ElementSet):
            return NotImplemented
        return self.parent is other.parent and self.members == other.members

    def __hash__(self) -> int:
        return hash((id(self.parent), self.members))

    def __repr__(self) -> str:
        inner = ",".join(map(str, self.members[:12]))
        more = ",..." if len(self.members) > 12 else ""
        return f"ElementSet({self.parent.name}:{{{inner}{more}}})"


def _same_parent(*sets: ElementSet) -> FiniteGroup:
    parent = sets[0].parent
    for s in sets[1:]:
        if s.parent is not parent:
            raise ParentMismatch(f"sets live in {parent.name} and {s.parent.name}")
    return parent


def set_product(H: ElementSet, K: ElementSet) -> ElementSet:
    G = _same_parent(H, K)
    prods = np.unique(G.table[np.ix_(H.array, K.array)])
    return ElementSet(G, tuple(int(x) for x in prods))


def intersect(H: ElementSet, K: ElementSet) -> ElementSet:
    G = _same_parent(H, K)
    return ElementSet(G, tuple(sorted(H._lookup & K._lookup)))


def is_subgroup(H: ElementSet) -> bool:
    if not H.members or H.members[0] != 0:
        return False
    G = H.parent
    prods = G.table[np.ix_(H.array, H.array)]
    return bool(H.mask()[prods].all())


def is_normal(H: ElementSet) -> bool:
    if not is_subgroup(H):
        return False
    G = H.parent
    T = G.table
    conj = T[T[:, H.array], G.inverse[:, None]]  # g h g^-1
    return bool(H.mask()[conj].all())


def _require_subgroup(H: ElementSet, what: str) -> None:
    if not is_subgroup(H):
        raise NotSubgroup(f"{what} {H!r} is not a subgroup")


@dataclass(frozen=True, eq=False)
class QuotientGroup:
    """Cosets of a normal subgroup, labeled by least member."""

    parent: FiniteGroup
    kernel: ElementSet
    within: ElementSet
    cosets: tuple[ElementSet, ...]
    quotient: FiniteGroup
    projection: np.ndarray  # element -> coset index, -1 outside `within`
    reps: tuple[int, ...] = field(default=())

    @property
    def order(self) -> int:
        return self.quotient.order

    def project(self, g: int) -> int:
        p = int(self.projection[g])
        if p < 0:
            raise ValueError(f"element {g} is outside the quotiented subgroup")
        return p


def quotient(G: FiniteGroup, N: ElementSet, within: ElementSet | None = None,
             name: str | None = None) -> QuotientGroup:
    """H/N where H = `within` (default: all of G)."""
    H = within if within is not None else G.whole()
    _same_parent(H, N)
    if H.parent is not G:
        raise ParentMismatch("quotient arguments must live in G")
    _require_subgroup(H, "ambient")
    _require_subgroup(N, "kernel")
    if not N.issubset(H):
        raise NotNested(f"{N!r} is not contained in {H!r}")
    T = G.table
    hm = H.array
    conj = T[T[np.ix_(hm, N.array)], G.inverse[hm][:, None]]
    if not N.mask()[conj].all():
        raise NotNormal(f"{N!r} is not normal in {H!r}")
    proj = np.full(G.order, -1, dtype=np.int64)
    cosets: list[ElementSet] = []
    reps: list[int] = []
    narr = N.array
    for g in H.members:
        if proj[g] >= 0:
            continue
        members = np.unique(T[g, narr])
        proj[members] = len(cosets)
        cosets.append(ElementSet(G, tuple(int(x) for x in members)))
        reps.append(g)
    r = np.array(reps, dtype=np.int64)
    qtable = proj[T[np.ix_(r, r)]]
    Q = validate_group(qtable, name or f"{G.name}/N")
    # the projection must respect products on all of H
    if not np.array_equal(proj[T[np.ix_(hm, hm)]], Q.table[np.ix_(proj[hm], proj[hm])]):
        raise NotNormal("coset projection is not a homomorphism")
    proj.setflags(write=False)
    return QuotientGroup(G, N, H, tuple(cosets), Q, proj, tuple(reps))


def transversal(H: ElementSet, K: ElementSet) -> list[int]:
    """Least member of every coset of K in H; the first entry is the identity."""
    G = _same_parent(H, K)
    _require_subgroup(H, "ambient")
    _require_subgroup(K, "kernel")
    if not K.issubset(H):
        raise NotNested(f"{K!r} is not contained in {H!r}")
    seen = np.zeros(G.order, dtype=bool)
    out = []
    karr = K.array
    for g in H.members:
        if seen[g]:
            continue
        out.append(g)
        seen[G.table[g, karr]] = True
    return out


@dataclass(frozen=True, eq=False)
class SubgroupChain:
    """Nested normal subgroups from {identity} to the whole group.

    Consecutive levels may coincide; a repeated level simply has the
    one-element transversal {identity}.
    """

    parent: FiniteGroup
    levels: tuple[ElementSet, ...]

    def __post_init__(self):
        G = self.parent
        if not self.levels:
            raise InvalidChain("empty chain")
        if self.levels[0].members != (0,):
            raise InvalidChain("level 0 must be the trivial subgroup")
        if len(self.levels[-1]) != G.order:
            raise InvalidChain("top level must be the whole group")
        for i, lev in enumerate(self.levels):
            if lev.parent is not G:
                raise ParentMismatch(f"level {i} lives in another group")
            if not is_normal(lev):
                raise InvalidChain(f"level {i} is not a normal subgroup")
            if i and not self.levels[i - 1].issubset(lev):
                raise InvalidChain(f"level {i - 1} is not contained in level {i}")


def chain_decompose(b: int, chain: SubgroupChain, reps: Sequence[Sequence[int]]) -> list[int]:
    """Write b = t_N ... t_1 with t_i in reps[i]; returns [t_N, ..., t_1].

    reps[0] is ignored (level 0 is trivial).  Works top-down: t_N is the
    representative of b's coset modulo levels[N-1], then recurse on t_N^-1 b.
    """
    G = chain.parent
    N = len(chain.levels) - 1
    if len(reps) != N + 1:
        raise InvalidChain(f"need {N + 1} representative lists, got {len(reps)}")
    masks = [lev.mask() for lev in chain.levels]
    out = []
    cur = int(b)
    for i in range(N, 0, -1):
        below = masks[i - 1]
        hit = [r for r in reps[i] if below[G.table[G.inverse[r], cur]]]
        if len(hit) != 1:
            raise InvalidChain(
                f"level {i}: {len(hit)} representatives match element {cur}; "
                "reps are not a transversal")
        r = hit[0]
        out.append(int(r))
        cur = int(G.table[G.inverse[r], cur])
    if cur != 0:
        raise InvalidChain(f"residue {cur} after peeling all levels")
    return out


def check_homomorphism(f, G: FiniteGroup, H: FiniteGroup) -> bool:
    f = np.asarray(f, dtype=np.int64)
    if f.shape != (G.order,) or f.min() < 0 or f.max() >= H.order:
        return False
    return bool(np.array_equal(f[G.table], H.table[np.ix_(f, f)]))


def check_isomorphism_via_bijection(f, G: FiniteGroup, H: FiniteGroup) -> bool:
    f = np.asarray(f, dtype=np.int64)
    if G.order != H.order or len(set(f.tolist())) != G.order:
        return False
    return check_homomorphism(f, G, H)


# built-in groups

def trivial_group() -> FiniteGroup:
    return validate_group([[0]], "1")


def cyclic_group(n: int) -> FiniteGroup:
    i = np.arange(n)
    return validate_group((i[:, None] + i[None, :]) % n, f"Z{n}")


def klein_four() -> FiniteGroup:
    """Z2 x Z2 with bit-pair labels 00->0, 01->1, 10->2, 11->3 (XOR)."""
    i = np.arange(4)
    return validate_group(i[:, None] ^ i[None, :], "V4")


def group_from_elements(elements: Sequence[Hashable], mul: Callable, name: str) -> FiniteGroup:
    """Tabulate a group from explicit elements; elements[0] must be the identity."""
    index = {e: i for i, e in enumerate(elements)}
    table = [[index[mul(a, b)] for b in elements] for a in elements]
    return validate_group(table, name)


def symmetric_group(n: int) -> FiniteGroup:
    perms = list(itertools.permutations(range(n)))

    def compose(p, q):  # apply q first, then p
        return tuple(p[q[i]] for i in range(n))

    return group_from_elements(perms, compose, f"S{n}")


def direct_product(G: FiniteGroup, H: FiniteGroup, name: str | None = None) -> FiniteGroup:
    """Element (g, h) has index g * |H| + h."""
    m = H.order
    g = np.arange(G.order * m)
    a, b = g // m, g % m
    table = G.table[np.ix_(a, a)] * m + H.table[np.ix_(b, b)]
    return validate_group(table, name or f"{G.name}x{H.name}")


BUILTIN = {
    "1": trivial_group,
    "trivial": trivial_group,
    "Z2": lambda: cyclic_group(2),
    "Z3": lambda: cyclic_group(3),
    "Z4": lambda: cyclic_group(4),
    "V4": klein_four,
    "S3": lambda: symmetric_group(3),
}


def builtin_group(name: str) -> FiniteGroup | None:
    if name in BUILTIN:
        return BUILTIN[name]()
    if name.startswith("Z") and name[1:].isdigit() and int(name[1:]) > 0:
        return cyclic_group(int(name[1:]))
    return None


# group file format

def parse_group(text: str, path: str | None = None) -> FiniteGroup:
    lines = [(i + 1, ln.split("#", 1)[0].strip()) for i, ln in enumerate(text.splitlines())]
    lines = [(i, ln) for i, ln in lines if ln]
    pos = 0

    def expect(keyword: str) -> tuple[int, list[str]]:
        nonlocal pos
        if pos >= len(lines):
            raise FormatError(f"expected '{keyword}', got end of file", None, path)
        no, ln = lines[pos]
        parts = ln.split()
        if parts[0] != keyword:
            raise FormatError(f"expected '{keyword}', got {parts[0]!r}", no, path)
        pos += 1
        return no, parts[1:]

    no, rest = expect("group")
    if len(rest) != 1:
        raise FormatError("usage: group <name>", no, path)
    name = rest[0]
    no, rest = expect("order")
    try:
        n = int(rest[0])
        assert len(rest) == 1 and n > 0
    except (ValueError, IndexError, AssertionError):
        raise FormatError("usage: order <positive integer>", no, path) from None
    expect("table")
    rows = []
    for _ in range(n):
        if pos >= len(lines):
            raise FormatError(f"table needs {n} rows", None, path)
        no, ln = lines[pos]
        try:
            row = [int(x) for x in ln.split()]
        except ValueError:
            raise FormatError(f"non-integer entry in row {ln!r}", no, path) from None
        if len(row) != n:
            raise FormatError(f"row has {len(row)} entries, expected {n}", no, path)
        rows.append(row)
        pos += 1
    expect("end")
    if pos != len(lines):
        raise FormatError("trailing content after 'end'", lines[pos][0], path)
    return validate_group(rows, name)


def format_group(G: FiniteGroup) -> str:
    out = [f"group {G.name}", f"order {G.order}", "table"]
    out += [" ".join(str(int(x)) for x in row) for row in G.table]
    out.append("end")
    return "\n".join(out) + "\n"
