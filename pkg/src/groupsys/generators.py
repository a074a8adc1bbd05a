"""Granules, generator bases and representative tensors.

A generator starting at time s with span k+1 is a codeword supported on
[s, s+k]; its branch components at s..s+k are what the encoder multiplies.
The basis keeps, for every (s, k), the least codeword of each granule coset
(identity first).  Representative matrices at time t are indexed by slots
(j, k) with 0 <= j <= k <= ell; slot (j, k) holds the time-t component of a
generator that started at t - j.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .algebra import ElementSet, QuotientGroup, quotient, set_product
from .chains import (
    controllability_index,
    delta,
    follower_power,
    in_window,
    lambda_quotient,
    segment_group,
    static_entry,
)
from .errors import TransversalDeficit
from .system import BlockCode, GroupTrellis


def slots(ell: int) -> list[tuple[int, int]]:
    """Canonical slot order: row k descending, column j ascending."""
    return [(j, k) for k in range(ell, -1, -1) for j in range(k + 1)]


def segment_subcode(code: BlockCode, t1: int, t2: int) -> ElementSet:
    """Codewords that are the identity outside [t1, t2]."""
    return code.subcode((code.first >= t1) & (code.last <= t2))


def granule(code: BlockCode, t: int, k: int) -> QuotientGroup:
    """C^{[t,t+k]} modulo C^{[t,t+k-1]} C^{[t+1,t+k]}."""
    top = segment_subcode(code, t, t + k)
    low = set_product(segment_subcode(code, t, t + k - 1), segment_subcode(code, t + 1, t + k))
    return quotient(code.group, low, within=top, name=f"Gamma[{t},{t + k}]")


def lambda_(trellis: GroupTrellis, t: int, k: int) -> QuotientGroup:
    """Segment quotient on [t, t+k], checked against the granule.

    The restriction of codewords to [t, t+k] must carry granule cosets
    bijectively and homomorphically onto the segment cosets.
    """
    lam = lambda_quotient(trellis, t, k)
    gam = granule(trellis.code, t, k)
    if lam.order != gam.order:
        raise AssertionError(f"|Lambda| = {lam.order} but |Gamma| = {gam.order} at ({t},{k})")
    sg = segment_group(trellis, t, k)
    mu = np.full(gam.order, -1, dtype=np.int64)
    for i, cos in enumerate(gam.cosets):
        images = {int(lam.projection[sg.of_codeword[c]]) for c in cos}
        if len(images) != 1 or -1 in images:
            raise AssertionError(f"granule coset {i} at ({t},{k}) straddles segment cosets")
        mu[i] = images.pop()
    if sorted(mu.tolist()) != list(range(lam.order)):
        raise AssertionError(f"granule-to-segment map at ({t},{k}) is not onto")
    if not np.array_equal(mu[gam.quotient.table], lam.quotient.table[np.ix_(mu, mu)]):
        raise AssertionError(f"granule-to-segment map at ({t},{k}) is not a homomorphism")
    return lam


@dataclass(frozen=True)
class GeneratorVector:
    start: int
    k: int
    codeword: int
    components: tuple[int, ...]  # branch indices at start .. start+k

    @property
    def span(self) -> int:
        return self.k + 1

    def is_identity(self) -> bool:
        return self.codeword == 0


def extract_generators(trellis: GroupTrellis, t: int, k: int,
                       prefer: Iterable[int] = ()) -> list[GeneratorVector]:
    """One codeword per granule coset, identity first.

    The default representative is the least codeword of the coset.  A
    codeword listed in `prefer` replaces it when it lies in a nontrivial
    coset (the first such codeword wins).
    """
    code = trellis.code
    gam = granule(code, t, k)
    reps = list(gam.reps)
    for c in prefer:
        i = int(gam.projection[c])
        if i > 0 and reps[i] == gam.reps[i]:
            reps[i] = int(c)
    gens = []
    for c in reps:
        comps = tuple(int(trellis.chi[tt][c]) if in_window(trellis, tt) else 0
                      for tt in range(t, t + k + 1))
        g = GeneratorVector(t, k, int(c), comps)
        if c != 0 and (code.first[c] != t or code.last[c] != t + k):
            raise AssertionError(f"generator {code.word(c)} does not span exactly [{t},{t + k}]")
        gens.append(g)
    # components at each offset form a transversal of F^j(Delta_k)/F^j(Delta_{k-1})
    for j in range(k + 1):
        top = follower_power(trellis, t, delta(trellis, t, k), j)
        bot = follower_power(trellis, t, delta(trellis, t, k - 1), j)
        _check_transversal([g.components[j] for g in gens], top, bot, f"generators ({t},{k}) offset {j}")
    return gens


def _check_transversal(reps: Sequence[int], top: ElementSet, bot: ElementSet, what: str) -> None:
    G = top.parent
    if len(reps) * len(bot) != len(top):
        raise TransversalDeficit(f"{what}: {len(reps)} representatives for index {len(top) // len(bot)}")
    seen = set()
    bmask = bot.mask()
    for r in reps:
        if r not in top:
            raise TransversalDeficit(f"{what}: representative {r} lies outside the upper group")
        coset = frozenset(int(x) for x in G.table[r, np.flatnonzero(bmask)])
        if coset in seen:
            raise TransversalDeficit(f"{what}: two representatives share a coset")
        seen.add(coset)


@dataclass(eq=False)
class GeneratorBasis:
    """Generators per (start, k); starts outside 0..L-1 are implicitly trivial."""

    trellis: GroupTrellis
    ell: int
    gens: dict
    constant: bool = False

    def at(self, s: int, k: int) -> list[GeneratorVector]:
        return self.gens.get((s, k), [GeneratorVector(s, k, 0, (0,) * (k + 1))])

    def nontrivial(self) -> list[GeneratorVector]:
        return [g for key in sorted(self.gens) for g in self.gens[key] if not g.is_identity()]

    def granule_orders(self) -> dict:
        return {key: len(v) for key, v in self.gens.items()}


def _shift_consistent(basis: GeneratorBasis) -> bool:
    """Generators at consecutive starts are shifts of one another."""
    code = basis.trellis.code
    L = code.length
    for k in range(basis.ell + 1):
        for s in range(0, L - k - 1):
            a = [code.word(g.codeword) for g in basis.at(s, k)]
            b = [code.word(g.codeword) for g in basis.at(s + 1, k)]
            if b != [(0,) + w[:-1] for w in a]:
                return False
    return True


def build_basis(trellis: GroupTrellis, prefer: Iterable[Sequence[int]] = ()) -> GeneratorBasis:
    """Generators for every start and span; `prefer` lists codewords (as
    words) to use as representatives where they fit."""
    ell = controllability_index(trellis)
    code = trellis.code
    pref = [code.index_of(w) for w in prefer]
    gens = {}
    for s in range(trellis.length):
        for k in range(ell + 1):
            gens[(s, k)] = extract_generators(trellis, s, k, pref)
    basis = GeneratorBasis(trellis, ell, gens)
    if trellis.code.period1:
        basis.constant = _shift_consistent(basis)
    return basis


@dataclass(frozen=True, eq=False)
class RepSet:
    """Per-slot representative lists at time t, identity first."""

    t: int
    ell: int
    slots: dict

    def __getitem__(self, jk: tuple[int, int]) -> list[int]:
        return self.slots[jk]


def complete_rep_set(trellis: GroupTrellis, basis: GeneratorBasis, t: int) -> RepSet:
    ell = basis.ell
    out = {}
    for j, k in slots(ell):
        reps = [g.components[j] for g in basis.at(t - j, k)]
        _check_transversal(reps, static_entry(trellis, t, j, k), static_entry(trellis, t, j, k - 1),
                           f"slot ({j},{k}) at time {t}")
        out[(j, k)] = reps
    return RepSet(t, ell, out)


@dataclass(frozen=True)
class RepStaticMatrix:
    """Representatives at one time; `values` and `prov` follow `slots(ell)`.

    `prov[i]` is the index of the generator (within its basis list) whose
    component fills the slot.
    """

    t: int
    ell: int
    values: tuple[int, ...]
    prov: tuple[int, ...]

    def get(self, j: int, k: int) -> int:
        return self.values[_slot_index(self.ell)[(j, k)]]

    def source(self, j: int, k: int) -> int:
        return self.prov[_slot_index(self.ell)[(j, k)]]

    def as_dict(self) -> dict:
        return dict(zip(slots(self.ell), self.values))


_SLOT_INDEX: dict[int, dict] = {}


def _slot_index(ell: int) -> dict:
    if ell not in _SLOT_INDEX:
        _SLOT_INDEX[ell] = {jk: i for i, jk in enumerate(slots(ell))}
    return _SLOT_INDEX[ell]


def rep_matrix(repset: RepSet, choice: Mapping[tuple[int, int], int]) -> RepStaticMatrix:
    """Matrix picking representative `choice[(j,k)]` (default 0) in every slot."""
    ell = repset.ell
    prov = tuple(int(choice.get(jk, 0)) for jk in slots(ell))
    vals = tuple(repset[jk][p] for jk, p in zip(slots(ell), prov))
    return RepStaticMatrix(repset.t, ell, vals, prov)


Tensor = tuple  # of RepStaticMatrix, one per time in the window


def tensor_from_selection(basis: GeneratorBasis, selection: Mapping[tuple[int, int], int]) -> Tensor:
    """Tensor using generator `selection[(s,k)]` (default identity) at each start."""
    L = basis.trellis.length
    for (s, k), i in selection.items():
        if not 0 <= i < len(basis.at(s, k)):
            raise IndexError(f"no generator {i} at start {s}, k={k}")
    out = []
    for t in range(L):
        prov, vals = [], []
        for j, k in slots(basis.ell):
            i = int(selection.get((t - j, k), 0))
            prov.append(i)
            vals.append(basis.at(t - j, k)[i].components[j])
        out.append(RepStaticMatrix(t, basis.ell, tuple(vals), tuple(prov)))
    return tuple(out)


def selection_of(tensor: Tensor) -> dict:
    """Nontrivial generator choices read back from a tensor's provenance."""
    sel = {}
    for m in tensor:
        for (j, k), p in zip(slots(m.ell), m.prov):
            if p:
                sel[(m.t - j, k)] = p
    return sel


def validate_tensor(tensor: Tensor, basis: GeneratorBasis) -> bool:
    """Slots hold components of basis generators, and each generator keeps
    feeding the next column until it is shifted out."""
    ell = basis.ell
    L = basis.trellis.length
    if len(tensor) != L:
        return False
    for t, m in enumerate(tensor):
        if m.t != t or m.ell != ell:
            return False
        for (j, k), v, p in zip(slots(ell), m.values, m.prov):
            gens = basis.at(t - j, k)
            if not 0 <= p < len(gens) or gens[p].components[j] != v:
                return False
    for t in range(L - 1):
        a, b = tensor[t], tensor[t + 1]
        for j, k in slots(ell):
            if j < k and a.source(j, k) != b.source(j + 1, k):
                return False
    return True


def format_basis(basis: GeneratorBasis) -> str:
    code = basis.trellis.code
    lines = [f"ell = {basis.ell}"]
    for (s, k), gens in sorted(basis.gens.items()):
        if len(gens) > 1:
            lines.append(f"granule t={s} k={k} : order {len(gens)}")
    for g in basis.nontrivial():
        w = code.word(g.codeword)
        lines.append(f"gen t={g.start} k={g.k} : {' '.join(map(str, w))}")
    if code.period1:
        lines.append(f"constant basis: {'yes' if basis.constant else 'no'}")
    return "\n".join(lines)


def format_tensor(tensor: Tensor) -> str:
    """Nontrivial entries as `r j k <branch>` lines under `t <time>` headers."""
    lines = ["tensor"]
    for m in tensor:
        body = [f"r {j} {k} {v}" for (j, k), v in zip(slots(m.ell), m.values) if v]
        if body:
            lines.append(f"t {m.t}")
            lines += body
    lines.append("end")
    return "\n".join(lines) + "\n"
