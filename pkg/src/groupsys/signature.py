"""u-tensors, signature checks, the generator group and trellis products.

The u-form of a representative matrix replaces every slot entry by the
first component of the generator that fills the slot.  A generator of
start s and span k+1 therefore shows the same value in slot (j, k) at every
time s+j it is visible, which is what makes the u-form conditions literal
slice equalities.

Every u-tensor of a block system corresponds to exactly one codeword, so the
groups of u-tensors here are carried by codeword indices of `code.group`.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .algebra import (
    ElementSet,
    FiniteGroup,
    check_homomorphism,
    check_isomorphism_via_bijection,
    is_normal,
    is_subgroup,
    quotient,
    validate_group,
)
from .chains import Report, controllability_index, in_window
from .encoder import GroupSystem, slice_group, triangle_positions
from .errors import GroupSysError, IllDefinedOperation, NotTimeInvariant, OverlapConflict
from .generators import Tensor, slots, tensor_from_selection
from .system import BlockCode, build_canonic_trellis


# u-form components

@dataclass(frozen=True)
class UComponent:
    """u-matrix at time t; `values` follow `slots(ell)`."""

    t: int
    ell: int
    values: tuple[int, ...]

    def get(self, j: int, k: int) -> int:
        return self.values[slots(self.ell).index((j, k))]

    def triangle(self, j: int, k: int) -> tuple[int, ...]:
        d = dict(zip(slots(self.ell), self.values))
        return tuple(d[p] for p in triangle_positions(j, k, self.ell))

    def is_identity(self) -> bool:
        return not any(self.values)


def to_u(system: GroupSystem, tensor: Tensor) -> tuple[UComponent, ...]:
    """Replace every slot by the first component of its generator."""
    out = []
    for m in tensor:
        vals = tuple(system.basis.at(m.t - j, k)[p].components[0]
                     for (j, k), p in zip(slots(m.ell), m.prov))
        out.append(UComponent(m.t, m.ell, vals))
    return tuple(out)


def u_of_codeword(system: GroupSystem, c: int) -> tuple[UComponent, ...]:
    return to_u(system, system.decode_codeword(c))


# induced sequences in u-form

@dataclass(eq=False)
class InducedSequence:
    """Per-time u-rows with a group on row indices; trivial outside the window.

    `rows[t]` has one row of slot values (in `slots(ell)` order) per element,
    row 0 being the identity, and `tables[t]` multiplies row indices.
    """

    ell: int
    rows: list
    tables: list
    _tri: dict = field(default_factory=dict, repr=False)

    @property
    def length(self) -> int:
        return len(self.rows)

    def rows_at(self, t: int) -> np.ndarray:
        if 0 <= t < self.length:
            return self.rows[t]
        return np.zeros((1, len(slots(self.ell))), dtype=np.int64)

    def table_at(self, t: int) -> np.ndarray:
        if 0 <= t < self.length:
            return self.tables[t]
        return np.zeros((1, 1), dtype=np.int64)

    def triangle(self, j: int, k: int, t: int) -> tuple[tuple, FiniteGroup, np.ndarray]:
        """(carrier, group, carrier index per row) of the (j,k) corner at t."""
        key = (j, k, t)
        if key not in self._tri:
            idx = {jk: i for i, jk in enumerate(slots(self.ell))}
            cols = [idx[p] for p in triangle_positions(j, k, self.ell)]
            self._tri[key] = slice_group(self.rows_at(t)[:, cols], self.table_at(t), f"u({j},{k})@{t}")
        return self._tri[key]


def induced_sequence(system: GroupSystem) -> InducedSequence:
    """The u-form groups of an analyzed system, transported from the branch groups."""
    return InducedSequence(system.ell,
                           [system.u_values(t) for t in range(system.length)],
                           [system.trellis.groups[t].table for t in range(system.length)])


def _pairs(ell: int):
    return [(j, k) for k in range(ell + 1) for j in range(k + 1)]


def _triangle_entry(report: Report, name: str, fn) -> tuple | None:
    try:
        tri = fn()
    except (IllDefinedOperation, GroupSysError) as e:
        report.add(name, False, str(e))
        return None
    report.add(name, True)
    return tri


def check_signature_sequence(seq: InducedSequence, report: Report | None = None,
                             times: Iterable[int] | None = None) -> Report:
    """u-form conditions: every corner carries a well-defined group, and the
    (j,k) corner at t equals the (j+1,k) corner at t+1 as a group."""
    report = report or Report("signature sequence (u-form)")
    ts = list(times) if times is not None else list(range(-1, seq.length))
    for t in ts:
        for j, k in _pairs(seq.ell):
            _triangle_entry(report, f"(i)c corner group[{j},{k}@{t}]", lambda: seq.triangle(j, k, t))
    for t in ts:
        for j, k in _pairs(seq.ell):
            if j == k:
                continue
            name = f"(ii)c slice equality[{j},{k}@{t}]"
            try:
                ca, ga, _ = seq.triangle(j, k, t)
                cb, gb, _ = seq.triangle(j + 1, k, t + 1)
            except (IllDefinedOperation, GroupSysError) as e:
                report.add(name, False, str(e))
                continue
            if ca != cb:
                diff = sorted(set(ca) ^ set(cb))[0]
                report.add(name, False, f"slice {diff} appears on one side only")
            elif not ga.same_table(gb):
                a, b = (int(x) for x in np.argwhere(ga.table != gb.table)[0])
                report.add(name, False, f"products of {ca[a]} and {ca[b]} differ")
            else:
                report.add(name, True)
    return report


def _is_bijection(f: np.ndarray, n: int) -> bool:
    return len(f) == n and f.min(initial=0) >= 0 and len(set(f.tolist())) == n


def verify_signature_sequence(system: GroupSystem) -> Report:
    """r-form conditions (i)a-(iii)a, u-form conditions (i)c-(ii)c, and the
    transport between the two forms, at every time of the window and at the
    boundary time just before it."""
    rep = Report("signature sequence")
    L = system.length
    for t in range(L):
        for j, k in _pairs(system.ell):
            tri = _triangle_entry(rep, f"(i)a corner group[{j},{k}@{t}]",
                                  lambda: system.triangle_group(j, k, t, "r"))
            if tri is not None:
                want = system.triangle_order_expected(j, k, t)
                rep.add(f"corner order[{j},{k}@{t}]", tri.order == want, f"{tri.order} vs {want}")
    for t in range(-1, L):
        for j, k in _pairs(system.ell):
            if j == k:
                continue
            try:
                f = system.shift_map(j, k, t, 1, "r")
                A = system.triangle_group(j, k, t, "r")
                B = system.triangle_group(j + 1, k, t + 1, "r")
            except (IllDefinedOperation, GroupSysError) as e:
                rep.add(f"(iii)a shift isomorphism[{j},{k}@{t}]", False, str(e))
                continue
            if (j, k) == (0, 1):
                rep.add(f"(ii)a state correspondence[{t}]", _is_bijection(f, B.order))
            rep.add(f"(iii)a shift isomorphism[{j},{k}@{t}]", check_isomorphism_via_bijection(f, A.group, B.group))
    for t in range(L):
        u = system.u_values(t)
        r = system.rep_values(t)
        n = system.group(t).order
        rep.add(f"transport r<->u[{t}]",
                len(np.unique(u, axis=0)) == n and len(np.unique(r, axis=0)) == n)
    check_signature_sequence(induced_sequence(system), rep)
    return rep


def central_time(system: GroupSystem) -> int:
    """A time whose matrices and those of the next time use only generators
    lying wholly inside the window."""
    return system.ell


def _require_time_invariant(system: GroupSystem) -> int:
    if not system.code.period1:
        raise NotTimeInvariant(f"{system.code.name} is not flagged period-1")
    if system.length < 2 * system.ell + 2:
        raise NotTimeInvariant(f"window {system.length} too short for ell = {system.ell}")
    if not system.basis.constant:
        raise NotTimeInvariant("generators are not shifts of one another")
    return central_time(system)


def _same_group_on_labels(labels_a: np.ndarray, table_a: np.ndarray,
                          labels_b: np.ndarray, table_b: np.ndarray) -> bool:
    """Two groups whose elements carry labels are equal as labelled groups."""
    ka = [tuple(r) for r in labels_a.tolist()]
    kb = {tuple(r): i for i, r in enumerate(labels_b.tolist())}
    if len(set(ka)) != len(ka) or set(ka) != set(kb):
        return False
    f = np.array([kb[x] for x in ka], dtype=np.int64)
    return bool(np.array_equal(f[table_a], table_b[np.ix_(f, f)]))


def _u_symbols(system: GroupSystem, t: int) -> np.ndarray:
    """u-rows with each generator start value replaced by its code symbol,
    which, unlike a branch index, does not depend on the time."""
    u = system.u_values(t).copy()
    for i, (j, _) in enumerate(system.slots):
        u[:, i] = system.trellis.label[t - j][u[:, i]]
    return u


def verify_signature_group(system: GroupSystem) -> Report:
    """Single-time conditions (i)b-(iii)b and (i)e-(ii)e at a central time.

    Raises NotTimeInvariant unless the code is flagged period-1, the window
    holds at least 2*ell+2 times and the basis is constant.
    """
    tc = _require_time_invariant(system)
    rep = Report(f"signature group (time {tc})")
    B0, B1 = system.group(tc), system.group(tc + 1)
    rep.add("time invariance[r provenance]",
            _same_group_on_labels(system.provenance(tc), B0.table, system.provenance(tc + 1), B1.table))
    rep.add("time invariance[u symbols]",
            _same_group_on_labels(_u_symbols(system, tc), B0.table, _u_symbols(system, tc + 1), B1.table))
    for j, k in _pairs(system.ell):
        _triangle_entry(rep, f"(i)b corner group[{j},{k}]", lambda: system.triangle_group(j, k, tc, "r"))
    for j, k in _pairs(system.ell):
        if j == k:
            continue
        try:
            f = system.shift_map(j, k, tc, 1, "r", same_time=True)
            A = system.triangle_group(j, k, tc, "r")
            B = system.triangle_group(j + 1, k, tc, "r")
        except (IllDefinedOperation, GroupSysError) as e:
            rep.add(f"(iii)b congruent isomorphism[{j},{k}]", False, str(e))
            continue
        if (j, k) == (0, 1):
            rep.add("(ii)b xi correspondence", _is_bijection(f, B.order))
        rep.add(f"(iii)b congruent isomorphism[{j},{k}]", check_isomorphism_via_bijection(f, A.group, B.group))
    seq = InducedSequence(system.ell, [_u_symbols(system, t) for t in range(system.length)],
                          [system.trellis.groups[t].table for t in range(system.length)])
    for j, k in _pairs(system.ell):
        tri = _triangle_entry(rep, f"(i)e corner group[{j},{k}]", lambda: seq.triangle(j, k, tc))
        if tri is None or j == k:
            continue
        ca, ga, _ = tri
        cb, gb, _ = seq.triangle(j + 1, k, tc)
        rep.add(f"(ii)e slice equality[{j},{k}]", ca == cb and ga.same_table(gb))
    rs = system.repsets[tc]
    for k in range(system.ell + 1):
        sizes = {len(rs[(j, k)]) for j in range(k + 1)}
        rep.add(f"equal row sizes[{k}]", len(sizes) == 1, f"sizes {sorted(sizes)}")
    return rep


def signature_group(system: GroupSystem) -> tuple[np.ndarray, FiniteGroup]:
    """u-rows and group at the central time of a time-invariant system."""
    tc = _require_time_invariant(system)
    return system.u_values(tc), system.group(tc)


# sliding compression and the generator group

@dataclass(frozen=True)
class CompressedTensor:
    """Generator points ((start, k), first component), nontrivial ones only."""

    ell: int
    points: tuple

    def as_dict(self) -> dict:
        return dict(self.points)

    def is_identity(self) -> bool:
        return not self.points


def sliding_compress(u: Sequence[UComponent]) -> CompressedTensor:
    """Store each generator point once; slots that share a point must agree."""
    if not u:
        raise ValueError("empty u-tensor")
    ell = u[0].ell
    pts: dict = {}
    for comp in u:
        for (j, k), v in zip(slots(ell), comp.values):
            key = (comp.t - j, k)
            if key in pts and pts[key] != v:
                raise OverlapConflict(f"point {key} is {pts[key]} at one time and {v} at time {comp.t}")
            pts[key] = v
    return CompressedTensor(ell, tuple(sorted((key, v) for key, v in pts.items() if v)))


def selection_of_compressed(system: GroupSystem, cu: CompressedTensor) -> dict:
    sel = {}
    for (s, k), v in cu.points:
        firsts = [g.components[0] for g in system.basis.at(s, k)]
        if v not in firsts:
            raise OverlapConflict(f"no generator at start {s}, k={k} begins with {v}")
        sel[(s, k)] = firsts.index(v)
    return sel


def expand(system: GroupSystem, cu: CompressedTensor) -> tuple[UComponent, ...]:
    """Inverse of sliding compression."""
    return to_u(system, tensor_from_selection(system.basis, selection_of_compressed(system, cu)))


def compress_codeword(system: GroupSystem, c: int) -> CompressedTensor:
    return sliding_compress(u_of_codeword(system, c))


def codeword_of_compressed(system: GroupSystem, cu: CompressedTensor) -> int:
    return system.encode_by_generators(selection_of_compressed(system, cu))


def generator_group_add(system: GroupSystem, a: CompressedTensor, b: CompressedTensor) -> CompressedTensor:
    """The generator group operation, transported through the codewords."""
    G = system.code.group
    c = G.mul(codeword_of_compressed(system, a), codeword_of_compressed(system, b))
    return compress_codeword(system, c)


# index sequences, U(i) and trellis products

Term = tuple  # (k, t): the corner (0, k) at time t


def index_sequence(system: GroupSystem, terms: Iterable[Sequence[int]]) -> tuple[Term, ...]:
    """Validated terms, sorted by time; times must be distinct."""
    out = sorted((int(k), int(t)) for k, t in terms)
    times = [t for _, t in out]
    if len(set(times)) != len(times):
        raise ValueError(f"index sequence repeats a time: {out}")
    for k, t in out:
        if not 0 <= k <= system.ell:
            raise ValueError(f"index (0,{k}) outside 0..{system.ell}")
    return tuple(sorted(out, key=lambda kt: kt[1]))


def _term_slices(system: GroupSystem, k: int, t: int) -> np.ndarray:
    """Carrier index of every codeword's (0,k) corner at time t, in u-form."""
    tri = system.triangle_group(0, k, t, "u")
    if not in_window(system.trellis, t):
        return np.zeros(system.code.size, dtype=np.int64)
    return tri.of_branch[system.trellis.chi[t]]


def term_points(system: GroupSystem, k: int, t: int) -> list[tuple[int, int]]:
    """Generator points (start, span index) seen by the (0,k) corner at t."""
    return [(t - m, n) for m, n in triangle_positions(0, k, system.ell)]


def u_subgroup_of_indices(system: GroupSystem, terms: Iterable[Sequence[int]]) -> ElementSet:
    """Codewords whose u-corners at the given terms are all the identity."""
    terms = index_sequence(system, terms)
    mask = np.ones(system.code.size, dtype=bool)
    for k, t in terms:
        mask &= _term_slices(system, k, t) == 0
    H = system.code.group.subset(np.flatnonzero(mask).tolist())
    if not (is_subgroup(H) and is_normal(H)):
        raise AssertionError(f"U(i) for {list(terms)} is not a normal subgroup")
    return H


@dataclass(eq=False)
class TrellisProductGroup:
    """Distinct sequences of u-corners over the terms, multiplied termwise.

    `carrier[i]` is a tuple of per-term slices; `of_codeword[c]` locates the
    image of codeword c.  The compressed twin lists the values of the
    generator points covered by the terms.
    """

    terms: tuple
    carrier: tuple
    group: FiniteGroup
    of_codeword: np.ndarray
    points: tuple
    compressed: tuple
    compressed_group: FiniteGroup
    to_compressed: np.ndarray

    @property
    def order(self) -> int:
        return self.group.order


def trellis_product_group(system: GroupSystem, terms: Iterable[Sequence[int]]) -> TrellisProductGroup:
    terms = index_sequence(system, terms)
    C = system.code
    tris = [system.triangle_group(0, k, t, "u") for k, t in terms]
    keys = np.stack([_term_slices(system, k, t) for k, t in terms], axis=1) if terms else \
        np.zeros((C.size, 0), dtype=np.int64)
    carrier_idx, of_codeword = np.unique(keys, axis=0, return_inverse=True)
    of_codeword = of_codeword.reshape(-1)
    lookup = {tuple(r): i for i, r in enumerate(carrier_idx.tolist())}
    n = len(carrier_idx)
    table = np.empty((n, n), dtype=np.int64)
    for a in range(n):
        for b in range(n):
            prod = tuple(int(tg.group.table[x, y]) for tg, x, y in zip(tris, carrier_idx[a], carrier_idx[b]))
            if prod not in lookup:
                raise AssertionError(f"termwise product leaves the carrier of {list(terms)}")
            table[a, b] = lookup[prod]
    G = validate_group(table, f"U{list(terms)}")
    kernel = u_subgroup_of_indices(system, terms)
    if n * len(kernel) != C.size:
        raise AssertionError(f"|U(i)| * |kernel| = {n} * {len(kernel)} != {C.size}")
    # same coset of U(i) iff same sequence of corners
    Q = quotient(C.group, kernel)
    for cos in Q.cosets:
        if len(set(of_codeword[cos.array].tolist())) != 1:
            raise AssertionError(f"a coset of U(i) for {list(terms)} splits across sequences")
    if len({int(of_codeword[cos.members[0]]) for cos in Q.cosets}) != Q.order:
        raise AssertionError(f"two cosets of U(i) for {list(terms)} share a sequence")
    carrier = tuple(tuple(tg.carrier[x] for tg, x in zip(tris, row)) for row in carrier_idx.tolist())
    # compressed twin: values of the covered generator points
    pts = tuple(sorted({p for k, t in terms for p in term_points(system, k, t)}))
    comp_rows = np.zeros((C.size, len(pts)), dtype=np.int64)
    for c in range(C.size):
        d = compress_codeword(system, c).as_dict()
        comp_rows[c] = [d.get(p, 0) for p in pts]
    comp_carrier, comp_of = np.unique(comp_rows, axis=0, return_inverse=True)
    comp_of = comp_of.reshape(-1)
    to_comp = np.full(n, -1, dtype=np.int64)
    for c in range(C.size):
        a = of_codeword[c]
        if to_comp[a] not in (-1, comp_of[c]):
            raise AssertionError("compressed points do not follow the corner sequence")
        to_comp[a] = comp_of[c]
    if len(comp_carrier) != n or len(set(to_comp.tolist())) != n:
        raise AssertionError("compressed twin is not in bijection with the product")
    comp_table = np.empty((n, n), dtype=np.int64)
    comp_table[np.ix_(to_comp, to_comp)] = to_comp[table]
    # the transported operation must agree with adding generator points
    if not np.array_equal(comp_of[C.group.table], comp_table[np.ix_(comp_of, comp_of)]):
        raise AssertionError("compressed operation is not the generator-group sum")
    H = validate_group(comp_table, f"Us{list(terms)}")
    if not check_isomorphism_via_bijection(to_comp, G, H):
        raise AssertionError("compressed twin is not isomorphic")
    comp = tuple(tuple(int(x) for x in r) for r in comp_carrier.tolist())
    return TrellisProductGroup(terms, carrier, G, of_codeword, pts, comp, H, to_comp)


@dataclass(eq=False)
class ProductHomomorphism:
    product: TrellisProductGroup
    image: np.ndarray  # carrier index per codeword
    fibers: list  # codeword lists, in carrier order
    kernel: ElementSet
    ok: bool


def hom_C_to_product(system: GroupSystem, terms: Iterable[Sequence[int]]) -> ProductHomomorphism:
    """Codeword -> tensor -> u-tensor -> corners at the terms.

    The image is computed through the decoder and compared with the
    product's own codeword map, then checked to be a homomorphism.
    """
    P = trellis_product_group(system, terms)
    C = system.code
    lookup = {x: i for i, x in enumerate(P.carrier)}
    image = np.empty(C.size, dtype=np.int64)
    for c in range(C.size):
        u = u_of_codeword(system, c)
        seq = tuple(u[t].triangle(0, k) if in_window(system.trellis, t)
                    else (0,) * len(triangle_positions(0, k, system.ell)) for k, t in P.terms)
        image[c] = lookup.get(seq, -1)
    ok = bool(np.array_equal(image, P.of_codeword)) and check_homomorphism(image, C.group, P.group)
    fibers = [np.flatnonzero(image == i).tolist() for i in range(P.order)]
    kernel = C.group.subset(fibers[0])
    return ProductHomomorphism(P, image, fibers, kernel, ok)


def check_product_projection(system: GroupSystem, outer: Iterable[Sequence[int]],
                             inner: Iterable[Sequence[int]]) -> bool:
    """Restricting corner sequences from `outer` to the nested `inner` terms
    is a homomorphism.  Inner terms must sit at times of `outer` with an
    equal or higher row."""
    A = trellis_product_group(system, outer)
    B = trellis_product_group(system, inner)
    at = {t: (i, k) for i, (k, t) in enumerate(A.terms)}
    plan = []
    for k, t in B.terms:
        if t not in at or k < at[t][1]:
            raise ValueError(f"term (0,{k})@{t} is not nested in {list(A.terms)}")
        i, ko = at[t]
        big = triangle_positions(0, ko, system.ell)
        plan.append((i, [big.index(p) for p in triangle_positions(0, k, system.ell)]))
    lookup = {x: n for n, x in enumerate(B.carrier)}
    f = np.array([lookup[tuple(tuple(row[i][c] for c in cols) for i, cols in plan)] for row in A.carrier],
                 dtype=np.int64)
    return check_homomorphism(f, A.group, B.group)


def cartesian_gap(system: GroupSystem, terms: Iterable[Sequence[int]]) -> tuple[int, int]:
    """(|product group|, product of the per-term corner orders)."""
    P = trellis_product_group(system, terms)
    full = 1
    for k, t in P.terms:
        full *= system.triangle_group(0, k, t, "u").order
    return P.order, full


def single_term_matches_corner(system: GroupSystem, k: int, t: int) -> bool:
    """A one-term product is the corner group itself."""
    P = trellis_product_group(system, [(k, t)])
    tri = system.triangle_group(0, k, t, "u")
    return tuple(x[0] for x in P.carrier) == tri.carrier and P.group.same_table(tri.group)


# k-controllable subcodes and the quotient sequence

def controllable_subcode(system: GroupSystem, k: int) -> ElementSet:
    """Closure of all codewords supported on at most k+1 consecutive times;
    k = -1 gives the identity alone."""
    C = system.code
    if k < 0:
        return C.group.trivial()
    seeds = np.flatnonzero((C.last - C.first <= k) | (np.arange(C.size) == 0))
    found = np.zeros(C.size, dtype=bool)
    found[seeds] = True
    frontier = seeds
    while frontier.size:
        prods = C.group.table[np.ix_(frontier, seeds)].reshape(-1)
        new = np.unique(prods[~found[prods]])
        found[new] = True
        frontier = new
    return C.group.subset(np.flatnonzero(found).tolist())


def column_terms(system: GroupSystem, k: int) -> list[Term]:
    """The index sequence with corner (0,k) at every time of the window."""
    return [(k, t) for t in range(system.length)]


def quotient_code(system: GroupSystem, k: int) -> BlockCode:
    """C / C_{k-1} written as a code over the (0,k) corner groups."""
    P = trellis_product_group(system, column_terms(system, k))
    alph = [system.triangle_group(0, k, t, "u").group for t in range(system.length)]
    tris = [system.triangle_group(0, k, t, "u") for t in range(system.length)]
    words = [tuple(tri.carrier.index(s) for tri, s in zip(tris, row)) for row in P.carrier]
    return BlockCode(f"{system.code.name}_mod_C{k - 1}", alph, words)


def quotient_sequence_check(system: GroupSystem) -> Report:
    """For each k: C_{k-1} is normal, it is the kernel of the map onto the
    column product for k, and the induced coset map is an isomorphism."""
    rep = Report("quotient sequence")
    C = system.code
    ell = system.ell
    rep.add("top subcode is the code[C_ell]", len(controllable_subcode(system, ell)) == C.size)
    for k in range(ell + 1):
        low = controllable_subcode(system, k - 1)
        rep.add(f"subcode normal[k={k}]", is_subgroup(low) and is_normal(low))
        terms = column_terms(system, k)
        U = u_subgroup_of_indices(system, terms)
        rep.add(f"kernel is C_(k-1)[k={k}]", U == low, f"|U(i)|={len(U)} |C_(k-1)|={len(low)}")
        P = trellis_product_group(system, terms)
        rep.add(f"order consistency[k={k}]", len(low) * P.order == C.size,
                f"{len(low)} * {P.order} vs {C.size}")
        Q = quotient(C.group, low)
        f = np.array([int(P.of_codeword[cos.members[0]]) for cos in Q.cosets], dtype=np.int64)
        constant = all(len(set(P.of_codeword[cos.array].tolist())) == 1 for cos in Q.cosets)
        rep.add(f"coset isomorphism[k={k}]", constant and check_isomorphism_via_bijection(f, Q.quotient, P.group))
        try:
            qc = quotient_code(system, k)
            m = controllability_index(build_canonic_trellis(qc))
            bound = ell - (k - 1)
            rep.notes.append(f"k={k}: C/C_(k-1) has {qc.size} words and is {m}-controllable "
                             f"({'within' if m <= bound else 'above'} the bound {bound})")
        except GroupSysError as e:
            rep.notes.append(f"k={k}: quotient code not analyzable: {e}")
    return rep


# block report

def _tt(x: int) -> str:
    return "t" if x == 0 else (f"t+{x}" if x > 0 else f"t{x}")


def _point_symbol(system: GroupSystem, s: int, n: int) -> str:
    live = len(system.basis.at(s, n)) > 1
    return f"{'r' if live else '1'}_{{0,{n}}}^{{{_tt(s)}}}"


def _group_name(k: int, t: int) -> str:
    return f"H_{{0,{k}}}^{{{_tt(t)}}}"


@dataclass(eq=False)
class ReportRow:
    terms: tuple
    points: tuple  # displayed points, in display order
    live: tuple  # nontrivial points
    order: int
    expected: int

    def set_name(self) -> str:
        return " join ".join(f"tri_{{0,{k}}}^{{{_tt(t)}}}" for k, t in self.terms)

    def group_name(self) -> str:
        return " join ".join(_group_name(k, t) for k, t in self.terms)


@dataclass(eq=False)
class BlockReport:
    system: GroupSystem
    stack: list  # rows k = ell..0 of [(k, t, order)] with t descending
    singles: list
    products: list
    fibers: list  # (terms, ProductHomomorphism)
    checks: Report

    def format(self) -> str:
        sysm = self.system
        out = [f"block report {sysm.code.name}: ell = {sysm.ell}, {sysm.code.size} codewords",
               "", "group stack"]
        width = max((len(_group_name(k, t)) + len(str(o)) + 3 for row in self.stack for k, t, o in row),
                    default=1)
        cols = max((len(row) for row in self.stack), default=0)
        for row in self.stack:
            cells = [f"{_group_name(k, t)} ({o})".ljust(width) for k, t, o in row]
            out.append("  " + " " * ((width + 2) * (cols - len(row))) + "  ".join(cells).rstrip())
        out += ["", "single corners"]
        for r in self.singles:
            reps = " x ".join(("{" + _point_symbol(sysm, s, n) + "}") if (s, n) in r.live
                              else _point_symbol(sysm, s, n) for s, n in r.points)
            out.append(f"  {r.set_name()} | {reps} | {r.group_name()} order {r.order}")
        out += ["", "corner products"]
        for r in self.products:
            reps = " x ".join("{" + _point_symbol(sysm, s, n) + "}" for s, n in r.points)
            out.append(f"  {r.set_name()} | {reps} | {r.group_name()} order {r.order}")
        for terms, hom in self.fibers:
            P = hom.product
            names = " join ".join(_group_name(k, t) for k, t in terms)
            pts = " ".join(_point_symbol(sysm, s, n) for s, n in P.points)
            out += ["", f"fibers of C -> {names}", f"  points: {pts}"]
            for i, fib in enumerate(hom.fibers):
                vals = " ".join(str(v) for v in P.compressed[P.to_compressed[i]])
                words = ", ".join(" ".join(str(int(x)) for x in sysm.code.word(c)) for c in fib)
                out.append(f"  [{vals}] <- {words}")
        out += ["", self.checks.format()]
        return "\n".join(out) + "\n"


def _display_points(system: GroupSystem, k: int, t: int) -> tuple:
    """Points of a corner ordered by slot column, then row."""
    pos = sorted(triangle_positions(0, k, system.ell))
    return tuple((t - m, n) for m, n in pos)


def _live(system: GroupSystem, pts: Iterable[tuple[int, int]]) -> tuple:
    return tuple(p for p in pts if len(system.basis.at(*p)) > 1)


def _expected_order(system: GroupSystem, live: Iterable[tuple[int, int]]) -> int:
    out = 1
    for p in live:
        out *= len(system.basis.at(*p))
    return out


def block_report(system: GroupSystem, fiber_terms: Sequence[Sequence[Sequence[int]]] | None = None,
                 fiber_limit: int = 256) -> BlockReport:
    """Group stack, single-corner groups, non-redundant corner products and
    homomorphism fibers, with every order checked against the generator
    points it covers."""
    L, ell = system.length, system.ell
    checks = Report("block report checks")
    stack = []
    for k in range(ell, -1, -1):
        row = []
        for n in range(L - 1 - k, -1, -1):
            row.append((k, n, system.triangle_group(0, k, n, "u").order))
        stack.append(row)
    singles = []
    for k in range(ell, -1, -1):
        for n in range(0, L - k):
            pts = _display_points(system, k, n)
            live = _live(system, pts)
            if not live:
                continue
            order = trellis_product_group(system, [(k, n)]).order
            row = ReportRow(((k, n),), pts, live, order, _expected_order(system, live))
            singles.append(row)
            checks.add(f"single order[{k}@{n}]", row.order == row.expected, f"{row.order} vs {row.expected}")
            checks.add(f"single is corner[{k}@{n}]", single_term_matches_corner(system, k, n))
    products = []
    by_time: dict = {}
    for r in singles:
        by_time.setdefault(r.terms[0][1], []).append(r)
    times = sorted(by_time)
    for size in range(2, len(times) + 1):
        for ts in itertools.combinations(times, size):
            for combo in itertools.product(*(by_time[t] for t in ts)):
                sets = [set(r.live) for r in combo]
                redundant = any(sets[i] <= set().union(*(sets[:i] + sets[i + 1:])) for i in range(len(sets)))
                if redundant:
                    continue
                terms = tuple(sorted((r.terms[0] for r in combo), key=lambda kt: -kt[1]))
                live = tuple(sorted(set().union(*sets), key=lambda p: (-p[0], p[1])))
                order = trellis_product_group(system, terms).order
                products.append(ReportRow(terms, live, live, order, _expected_order(system, live)))
    products.sort(key=lambda r: (len(r.terms), [(t, -k) for k, t in r.terms]))
    for r in products:
        name = ",".join(f"{k}@{t}" for k, t in r.terms)
        checks.add(f"product order[{name}]", r.order == r.expected, f"{r.order} vs {r.expected}")
    fibers = []
    if fiber_terms is None:
        if system.code.size <= fiber_limit:
            fiber_terms = [r.terms for r in singles if 1 < r.order < system.code.size]
        else:
            fiber_terms = []
    for terms in fiber_terms:
        hom = hom_C_to_product(system, terms)
        name = ",".join(f"{k}@{t}" for k, t in hom.product.terms)
        checks.add(f"homomorphism[{name}]", hom.ok)
        fibers.append((tuple(sorted(hom.product.terms, key=lambda kt: -kt[1])), hom))
    return BlockReport(system, stack, singles, products, fibers, checks)


def format_certificate(report: Report, verbose: bool = False) -> str:
    return report.format(verbose)
