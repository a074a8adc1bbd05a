"""The time-domain encoder, its inverse, and the groups it induces.

`GroupSystem` bundles a code with its trellis, controllability index, basis
and per-time representative sets.  At time t the encoder multiplies the
representatives of a matrix in the fixed order

    r_{ell,ell} r_{ell,ell-1}... r_{ell-1,ell} ... r_{0,ell} ... r_{0,0}

(column j descending, then row k descending), and decoding peels the same
factors off a normal chain read column by column.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Mapping, Sequence

import numpy as np

from .algebra import (
    FiniteGroup,
    SubgroupChain,
    chain_decompose,
    check_homomorphism,
    validate_group,
)
from .chains import _x, branch_group, controllability_index, in_window, static_entry
from .errors import ForeignRepresentative, IllDefinedOperation, InvalidChain, ShiftViolation
from .generators import (
    GeneratorBasis,
    RepSet,
    RepStaticMatrix,
    Tensor,
    build_basis,
    complete_rep_set,
    slots,
    validate_tensor,
)
from .system import BlockCode, GroupTrellis, build_canonic_trellis

def encode_order(ell: int) -> list[tuple[int, int]]:
    """Factor order of the encoder, leftmost first."""
    return [(j, k) for j in range(ell, -1, -1) for k in range(ell, j - 1, -1)]


def chain_order(ell: int) -> list[tuple[int, int]]:
    """Static-matrix slots read column-major, bottom to top."""
    return [(j, k) for j in range(ell + 1) for k in range(j, ell + 1)]


def triangle_positions(j: int, k: int, ell: int) -> list[tuple[int, int]]:
    """Slots (m, n) of the upper corner with apex (j, k), in canonical order."""
    return [(m, n) for n in range(ell, k - 1, -1) for m in range(j, j + n - k + 1)]


def slice_group(rows: np.ndarray, table: np.ndarray, name: str) -> tuple[tuple, FiniteGroup, np.ndarray]:
    """Group induced on the distinct rows of `rows` by a group on row indices.

    Returns the sorted carrier, its group and the carrier index of every row.
    Raises IllDefinedOperation with a witness pair when the product slice
    depends on more than the two factor slices.
    """
    carrier, of_row = np.unique(rows, axis=0, return_inverse=True)
    of_row = of_row.reshape(-1)
    _, rep = np.unique(of_row, return_index=True)  # first row of each slice
    induced = of_row[table[np.ix_(rep, rep)]]
    full = of_row[table]
    pred = induced[np.ix_(of_row, of_row)]
    if not np.array_equal(full, pred):
        a, b = (int(x) for x in np.argwhere(full != pred)[0])
        raise IllDefinedOperation(
            f"{name}: elements {a},{b} give a product slice that depends on the hidden entries")
    G = validate_group(induced, name)
    return tuple(tuple(int(x) for x in row) for row in carrier), G, of_row


@dataclass(frozen=True, eq=False)
class ComponentGroup:
    """Representative matrices at time t, indexed by branch, with B^t's table."""

    t: int
    carrier: tuple  # RepStaticMatrix per branch index
    group: FiniteGroup


@dataclass(frozen=True, eq=False)
class TriangleGroup:
    """Group on the distinct slices of the upper corner (j, k) at time t.

    `form` is "r" for representative values, "u" for generator start values.
    `of_branch[b]` is the carrier index of branch b's slice.
    """

    j: int
    k: int
    t: int
    form: str
    positions: tuple
    carrier: tuple
    group: FiniteGroup
    of_branch: np.ndarray

    @property
    def order(self) -> int:
        return self.group.order

    def index(self, slice_: Sequence[int]) -> int:
        return self.carrier.index(tuple(slice_))


class GroupSystem:
    """A block code with everything the encoder needs, computed once."""

    def __init__(self, code: BlockCode, trellis: GroupTrellis | None = None,
                 prefer: Sequence[Sequence[int]] = ()):
        self.code = code
        self.trellis = trellis or build_canonic_trellis(code)
        self.ell = controllability_index(self.trellis)
        self.basis: GeneratorBasis = build_basis(self.trellis, prefer)
        self.repsets: list[RepSet] = [complete_rep_set(self.trellis, self.basis, t)
                                      for t in range(self.length)]
        self._chains = [self._decode_chain(t) for t in range(self.length)]
        self._tri: dict = {}

    @property
    def length(self) -> int:
        return self.code.length

    @property
    def slots(self) -> list[tuple[int, int]]:
        return slots(self.ell)

    def group(self, t: int) -> FiniteGroup:
        return branch_group(self.trellis, t)

    def _decode_chain(self, t: int) -> SubgroupChain:
        tr, ell = self.trellis, self.ell
        levels = [static_entry(tr, t, 0, -1)]
        for j, k in chain_order(ell):
            if k == j and j > 0 and static_entry(tr, t, j, j - 1) != static_entry(tr, t, j - 1, ell):
                raise InvalidChain(f"time {t}: column {j} does not start where column {j - 1} ends")
            levels.append(static_entry(tr, t, j, k))
        return SubgroupChain(self.trellis.groups[t], tuple(levels))

    # encoding

    def encode_component(self, m: RepStaticMatrix) -> int:
        t = m.t
        rs = self.repsets[t]
        vals = m.as_dict()
        B = self.trellis.groups[t]
        acc = 0
        for jk in encode_order(self.ell):
            v = vals[jk]
            if v not in rs[jk]:
                raise ForeignRepresentative(f"time {t}: {v} is not a representative of slot {jk}")
            acc = B.mul(acc, v)
        return acc

    def encode_path(self, tensor: Tensor) -> tuple[int, ...]:
        if not validate_tensor(tensor, self.basis):
            raise ShiftViolation("tensor breaks the shift condition")
        path = tuple(self.encode_component(m) for m in tensor)
        tr = self.trellis
        for t in range(self.length - 1):
            if tr.right[t][path[t]] != tr.left[t + 1][path[t + 1]]:
                raise ShiftViolation(f"branches at {t} and {t + 1} do not meet")
        if tr.left[0][path[0]] != 0 or tr.right[-1][path[-1]] != 0:
            raise ShiftViolation("path does not start and end in the identity state")
        return path

    def encode_codeword(self, tensor: Tensor) -> int:
        return self.trellis.codeword_of_path(self.encode_path(tensor))

    def encode_by_generators(self, selection: Mapping[tuple[int, int], int]) -> int:
        """Codeword product of the selected generators, starts ascending and
        spans descending: an independent route to the same codeword."""
        G = self.code.group
        acc = 0
        for (s, k) in sorted(selection, key=lambda sk: (sk[0], -sk[1])):
            acc = G.mul(acc, self.basis.at(s, k)[selection[(s, k)]].codeword)
        return acc

    # decoding

    def decode_component(self, b: int, t: int) -> RepStaticMatrix:
        rs = self.repsets[t]
        order = chain_order(self.ell)
        reps = [[0]] + [rs[jk] for jk in order]
        factors = chain_decompose(b, self._chains[t], reps)  # top level first
        picked = dict(zip(reversed(order), factors))
        vals = tuple(picked[jk] for jk in self.slots)
        prov = tuple(rs[jk].index(picked[jk]) for jk in self.slots)
        return RepStaticMatrix(t, self.ell, vals, prov)

    def decode_path(self, path: Sequence[int]) -> Tensor:
        tensor = tuple(self.decode_component(int(b), t) for t, b in enumerate(path))
        if not validate_tensor(tensor, self.basis):
            raise ShiftViolation("decoded matrices break the shift condition")
        return tensor

    def decode_codeword(self, c: int) -> Tensor:
        return self.decode_path(self.trellis.path_of(c))

    # induced groups

    @cached_property
    def _matrices(self) -> list[tuple[np.ndarray, np.ndarray]]:
        """Per time: (values, provenance) arrays of shape (|B^t|, slots)."""
        out = []
        for t in range(self.length):
            ms = [self.decode_component(b, t) for b in range(self.trellis.groups[t].order)]
            out.append((np.array([m.values for m in ms], dtype=np.int64).reshape(len(ms), -1),
                        np.array([m.prov for m in ms], dtype=np.int64).reshape(len(ms), -1)))
        return out

    def rep_values(self, t: int) -> np.ndarray:
        if not in_window(self.trellis, t):
            return np.zeros((1, len(self.slots)), dtype=np.int64)
        return self._matrices[t][0]

    def provenance(self, t: int) -> np.ndarray:
        if not in_window(self.trellis, t):
            return np.zeros((1, len(self.slots)), dtype=np.int64)
        return self._matrices[t][1]

    @cached_property
    def _u_values(self) -> list[np.ndarray]:
        out = []
        for t in range(self.length):
            prov = self._matrices[t][1]
            u = np.zeros_like(prov)
            for i, (j, k) in enumerate(self.slots):
                firsts = np.array([g.components[0] for g in self.basis.at(t - j, k)], dtype=np.int64)
                u[:, i] = firsts[prov[:, i]]
            out.append(u)
        return out

    def u_values(self, t: int) -> np.ndarray:
        """Slot (j, k) holds the first component of the generator in that slot."""
        if not in_window(self.trellis, t):
            return np.zeros((1, len(self.slots)), dtype=np.int64)
        return self._u_values[t]

    def component_group(self, t: int) -> ComponentGroup:
        B = self.trellis.groups[t]
        carrier = tuple(self.decode_component(b, t) for b in range(B.order))
        return ComponentGroup(t, carrier, B)

    def induced_product(self, m1: RepStaticMatrix, m2: RepStaticMatrix) -> RepStaticMatrix:
        if m1.t != m2.t:
            raise ValueError("matrices live at different times")
        B = self.trellis.groups[m1.t]
        return self.decode_component(B.mul(self.encode_component(m1), self.encode_component(m2)), m1.t)

    def slot_columns(self, positions) -> list[int]:
        idx = {jk: i for i, jk in enumerate(self.slots)}
        return [idx[p] for p in positions]

    def triangle_group(self, j: int, k: int, t: int, form: str = "r") -> TriangleGroup:
        key = (j, k, t, form)
        if key in self._tri:
            return self._tri[key]
        pos = tuple(triangle_positions(j, k, self.ell))
        mat = self.rep_values(t) if form == "r" else self.u_values(t)
        carrier, G, of_branch = slice_group(mat[:, self.slot_columns(pos)], self.group(t).table,
                                            f"tri({j},{k})@{t}")
        tg = TriangleGroup(j, k, t, form, pos, carrier, G, of_branch)
        self._tri[key] = tg
        return tg

    def triangle_order_expected(self, j: int, k: int, t: int) -> int:
        """|B^s| / |X_{k-1}^s| with s = t+k-j, the time of the congruent (k,k) corner."""
        s = t + k - j
        return self.group(s).order // len(_x(self.trellis, s, k - 1))

    def shift_map(self, j: int, k: int, t: int, d: int = 1, form: str = "r",
                  same_time: bool = False) -> np.ndarray:
        """Same-generator map from the (j,k) corner at t to the (j+d,k) corner.

        Slot (m, n) at t holds generator p of start t-m.  The target corner
        lives at t+d, where that generator sits in slot (m+d, n); with
        `same_time` it lives at t and slot (m+d, n) is read from generator p
        of start t-m-d instead, which is the same vector when the basis is
        constant.  Entries are -1 where the map is not well defined.
        """
        t2 = t if same_time else t + d
        src = self.triangle_group(j, k, t, form)
        dst = self.triangle_group(j + d, k, t2, form)
        lookup = {c: i for i, c in enumerate(dst.carrier)}
        prov = self.provenance(t)[:, self.slot_columns(src.positions)]
        out = np.full(src.order, -1, dtype=np.int64)
        bad = np.full(src.order, -1, dtype=np.int64)
        for b in range(self.group(t).order):
            vals = []
            for (m, n), p in zip(src.positions, prov[b]):
                gens = self.basis.at(t2 - m - d, n)
                if p >= len(gens):
                    return bad
                g = gens[int(p)]
                vals.append(g.components[m + d] if form == "r" else g.components[0])
            # target slices list positions (m + d, n) in the same canonical order
            idx = lookup.get(tuple(vals), -1)
            if out[src.of_branch[b]] not in (-1, idx):
                return bad
            out[src.of_branch[b]] = idx
        return out

    def congruent_map(self, j: int, k: int, t: int, form: str = "r") -> np.ndarray:
        """Same-generator map from the (j,k) corner at t to the (k,k) corner at t+k-j."""
        return self.shift_map(j, k, t, k - j, form)


def check_projection(system: GroupSystem, outer: tuple[int, int], inner: tuple[int, int], t: int,
                     form: str = "r") -> bool:
    """Slice restriction from a corner onto a nested corner is a homomorphism."""
    A = system.triangle_group(*outer, t, form)
    Bg = system.triangle_group(*inner, t, form)
    cols = [A.positions.index(p) for p in Bg.positions]
    f = np.array([Bg.carrier.index(tuple(row[c] for c in cols)) for row in A.carrier], dtype=np.int64)
    return check_homomorphism(f, A.group, Bg.group)


def nested(outer: tuple[int, int], inner: tuple[int, int], ell: int) -> bool:
    return set(triangle_positions(*inner, ell)) <= set(triangle_positions(*outer, ell))


def analyze(code: BlockCode, prefer: Sequence[Sequence[int]] = ()) -> GroupSystem:
    return GroupSystem(code, prefer=prefer)
