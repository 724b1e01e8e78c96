"""Fermion-to-qubit maps derived from qubit trees.

A mode ``j`` is built from a pair of tree generators ``(e1, e2)`` as
``a_j = (e1 + i e2) / 2i``. Which pair is used depends on the tree kind:

* x-y trees: ``e1`` is the z-generator of the x-child of ``j`` (or the
  x-generator of ``j`` when it has none), ``e2`` likewise for the y-child.
* x-z trees: ``e1`` is the z-generator at the end of the z-chain hanging off
  the x-child of ``j`` (or the x-generator of ``j``), ``e2`` the y-generator.

The z-generator of the root is the one left unpaired. The number operator
``a_j^+ a_j`` is ``(1 - P_j) / 2`` with ``P_j`` a z-only word, so occupations
``n`` of the qubits and the encoded occupations of the modes are related by
XOR over small index sets.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Mapping, NamedTuple, Sequence

import numpy as np

from .pauli import PauliTerm, anticommutes, multiply, to_dense
from .tree import (
    GeneratorSet,
    QubitTree,
    TreeError,
    build_jw_chain,
    build_xz_binary,
    generators,
    stub,
)

MAX_BK_MODES = 1024


@dataclass(frozen=True)
class LadderOperator:
    mode: int
    e_prime: PauliTerm
    e_dprime: PauliTerm

    @property
    def width(self) -> int:
        return self.e_prime.width

    def terms(self, dagger: bool = False) -> list[tuple[complex, PauliTerm]]:
        """``[(coefficient, word), ...]`` with phase-free words."""
        c1 = 0.5 * 1j ** (self.e_prime.phase - 1)
        c2 = 0.5 * 1j ** self.e_dprime.phase
        if dagger:
            c2 = -c2
        return [(c1, self.e_prime.word()), (c2, self.e_dprime.word())]

    def to_dense(self, dagger: bool = False) -> np.ndarray:
        return sum(c * to_dense(w) for c, w in self.terms(dagger))

    def format(self, dagger: bool = False) -> str:
        # TERM1/TERM2 are e'/i and e''/i, so a = 1/2 TERM1 + i/2 TERM2
        t1 = self.e_prime.scale(-1)
        t2 = self.e_dprime.scale(-1)
        name = f"a_{self.mode}" + ("^+" if dagger else "")
        sign = "-" if dagger else "+"
        return f"{name} = ½({t1}) {sign} ½i({t2})"


@dataclass(frozen=True)
class NumberOperator:
    """``a_j^+ a_j = (1 - pauli) / 2`` for a z-only Hermitian word ``pauli``."""

    node: int
    pauli: PauliTerm

    def eigenvalue(self, bits: Sequence[int]) -> int:
        parity = sum(bits[k] for k in self.pauli.support) % 2
        return parity if self.pauli.phase == 0 else 1 - parity

    def to_dense(self) -> np.ndarray:
        p = to_dense(self.pauli)
        return 0.5 * (np.eye(p.shape[0]) - p)


def tree_kind(tree: QubitTree) -> str:
    """``"xy"``, ``"xz"`` or ``"ternary"``; trees using only x-edges count as x-y."""
    labels = tree.labels()
    if "z" not in labels:
        return "xy"
    if "y" not in labels:
        return "xz"
    return "ternary"


def z_chain(tree: QubitTree, start: int | None) -> list[int]:
    """``start`` followed by the nodes reached from it along z-edges."""
    chain = []
    while start is not None:
        chain.append(start)
        start = tree.child(start, "z")
    return chain


def encoded_children(tree: QubitTree, node: int) -> list[int]:
    """Nodes whose occupation is XOR-ed into the encoded bit of ``node``.

    For x-y trees these are the tree children; for x-z trees the z-chain
    below the x-child, i.e. the children of ``node`` in the general tree
    the x-z tree encodes.
    """
    kind = tree_kind(tree)
    if kind == "xy":
        return sorted(tree.children(node).values())
    if kind == "xz":
        return z_chain(tree, tree.child(node, "x"))
    raise TreeError("occupation structure needs an x-y or x-z tree")


def _pair(tree: QubitTree, gs: GeneratorSet, node: int, kind: str) -> LadderOperator:
    if kind == "xy":
        cx, cy = tree.child(node, "x"), tree.child(node, "y")
        e1 = gs.by_origin(cx, "z") if cx is not None else gs.by_origin(node, "x")
        e2 = gs.by_origin(cy, "z") if cy is not None else gs.by_origin(node, "y")
    else:
        chain = z_chain(tree, tree.child(node, "x"))
        e1 = gs.by_origin(chain[-1], "z") if chain else gs.by_origin(node, "x")
        e2 = gs.by_origin(node, "y")
    return LadderOperator(node, e1, e2)


def ladder_binary_xy(tree: QubitTree) -> list[LadderOperator]:
    if tree_kind(tree) != "xy":
        raise TreeError("ladder_binary_xy needs a binary x-y tree (no z-edges)")
    gs = generators(tree)
    return [_pair(tree, gs, j, "xy") for j in tree.nodes]


def ladder_xz(tree: QubitTree) -> list[LadderOperator]:
    if "y" in tree.labels():
        raise TreeError("ladder_xz needs a binary x-z tree (no y-edges)")
    gs = generators(tree)
    return [_pair(tree, gs, j, "xz") for j in tree.nodes]


def ladder_jw(m: int) -> list[LadderOperator]:
    """Jordan-Wigner ladders ``a_j = Z_1 ... Z_{j-1} (X_j + i Y_j) / 2``."""
    return ladder_xz(build_jw_chain(m))


def ladder_operators(tree: QubitTree) -> list[LadderOperator]:
    kind = tree_kind(tree)
    if kind == "xy":
        return ladder_binary_xy(tree)
    if kind == "xz":
        return ladder_xz(tree)
    raise TreeError("ladder operators need an x-y or x-z tree")


def majoranas_anticommute(ladders: Sequence[LadderOperator]) -> bool:
    """Symbolic CAR check: all ``2m`` underlying generators anticommute pairwise."""
    es = [e for a in ladders for e in (a.e_prime, a.e_dprime)]
    if len({(e.x, e.z) for e in es}) != len(es):
        return False
    return all(anticommutes(a, b) for a, b in itertools.combinations(es, 2))


def number_operator(tree: QubitTree, node: int) -> NumberOperator:
    if node not in tree:
        raise TreeError(f"unknown node {node}")
    a = _pair(tree, generators(tree), node, tree_kind(tree))
    p = multiply(a.e_prime, a.e_dprime).scale(1)
    assert p.is_z_only() and p.phase in (0, 2)
    return NumberOperator(node, p)


# occupation maps ------------------------------------------------------------

@dataclass(frozen=True)
class OccupationMap:
    """XOR relations between qubit bits ``n`` and encoded bits.

    Bit vectors are indexed by qubit position (ascending node id).
    ``c``: encoded children; ``d``/``s``: descendants/subtree in the qubit
    tree; ``D``: descendants in the encoded general tree.
    """

    nodes: tuple[int, ...]
    kind: Mapping[int, str]
    c: Mapping[int, tuple[int, ...]]
    d: Mapping[int, tuple[int, ...]]
    s: Mapping[int, tuple[int, ...]]
    D: Mapping[int, tuple[int, ...]]

    @property
    def m(self) -> int:
        return len(self.nodes)

    def _positions(self, table):
        pos = {j: k for k, j in enumerate(self.nodes)}
        return [np.array([pos[i] for i in table[j]], dtype=np.intp) for j in self.nodes]

    def forward(self, n) -> np.ndarray:
        return occupation_forward(self, n)

    def inverse(self, n_enc) -> np.ndarray:
        return occupation_inverse(self, n_enc)

    def csv_rows(self) -> list[list[str]]:
        fmt = lambda xs: " ".join(str(x) for x in xs)
        return [
            [str(j), self.kind[j], fmt(self.c[j]), fmt(self.s[j]), fmt(self.D[j])]
            for j in self.nodes
        ]


def occupation_map(tree: QubitTree) -> OccupationMap:
    c = {j: tuple(encoded_children(tree, j)) for j in tree.nodes}
    D: dict[int, tuple[int, ...]] = {}

    def gdesc(j):
        if j not in D:
            out = []
            for k in c[j]:
                out.append(k)
                out.extend(gdesc(k))
            D[j] = tuple(sorted(out))
        return D[j]

    # post-order to keep recursion shallow on deep chains
    for j in sorted(tree.nodes, key=tree.level, reverse=True):
        gdesc(j)
    d = {j: tuple(tree.descendants(j)) for j in tree.nodes}
    s = {j: tuple(sorted(d[j] + (j,))) for j in tree.nodes}
    kind = {j: "internal" if c[j] else "terminal" for j in tree.nodes}
    return OccupationMap(tree.nodes, kind, c, d, s, D)


def _as_bits(omap: OccupationMap, n) -> tuple[np.ndarray, bool]:
    arr = np.asarray(n, dtype=np.uint8)
    single = arr.ndim == 1
    arr = np.atleast_2d(arr)
    if arr.shape[1] != omap.m:
        raise ValueError(f"bit vector length {arr.shape[1]} does not match m={omap.m}")
    if np.any(arr > 1):
        raise ValueError("bit vectors must contain only 0 and 1")
    return arr, single


def occupation_forward(omap: OccupationMap, n) -> np.ndarray:
    """Encoded bits: ``n_j`` XOR the bits of the encoded children of ``j``."""
    arr, single = _as_bits(omap, n)
    out = arr.copy()
    for k, idx in enumerate(omap._positions(omap.c)):
        if idx.size:
            out[:, k] ^= np.bitwise_xor.reduce(arr[:, idx], axis=1)
    return out[0] if single else out


def occupation_inverse(omap: OccupationMap, n_enc) -> np.ndarray:
    """Qubit bits: XOR of encoded bits over ``j`` and its general-tree descendants."""
    arr, single = _as_bits(omap, n_enc)
    out = arr.copy()
    for k, idx in enumerate(omap._positions(omap.D)):
        if idx.size:
            out[:, k] ^= np.bitwise_xor.reduce(arr[:, idx], axis=1)
    return out[0] if single else out


# general trees and Bravyi-Kitaev ---------------------------------------------

def gtree_to_xz(root: int, children: Mapping[int, Sequence[int]]) -> QubitTree:
    """Encode a tree of unbounded fan-out as a binary x-z tree.

    Node ``j`` with children ``c1..cl`` gets an x-edge to ``c1`` and the
    children are strung together by z-edges ``c1 -> c2 -> ... -> cl``.
    """
    edges = []
    for j, kids in children.items():
        kids = list(kids)
        if not kids:
            continue
        edges.append((j, kids[0], "x"))
        edges.extend((a, b, "z") for a, b in zip(kids, kids[1:]))
    return QubitTree(root, edges)


def xz_to_gtree(tree: QubitTree) -> dict[int, list[int]]:
    """Inverse of :func:`gtree_to_xz` (children lists keyed by node)."""
    if "y" in tree.labels():
        raise TreeError("not an x-z tree")
    if tree.child(tree.root, "z") is not None:
        raise TreeError("root of an encoded general tree has no z-edge")
    return {j: z_chain(tree, tree.child(j, "x")) for j in tree.nodes}


def bk_numbering(m: int) -> dict[int, int]:
    """Map ids of the x-z tree with ``m = 2**L`` nodes to Bravyi-Kitaev qubit ids.

    The extra root 0 becomes ``m - 1``; heap node ``h`` at depth ``d`` and
    offset ``p`` in its level becomes ``(2p + 1) * 2**(L-1-d) - 1``.
    """
    levels = m.bit_length() - 1
    out = {0: m - 1}
    for h in range(1, m):
        depth = h.bit_length() - 1
        p = h - (1 << depth)
        out[h] = (2 * p + 1) * (1 << (levels - 1 - depth)) - 1
    return out


class BravyiKitaev(NamedTuple):
    tree: QubitTree
    numbering: dict[int, int]
    ladders: list[LadderOperator]
    bk_tree: QubitTree


def bk_standard(m: int) -> BravyiKitaev:
    """The Bravyi-Kitaev instance on ``m = 2**L`` modes as an x-z tree.

    ``tree`` uses level-order ids with the extra root 0; ``bk_tree`` is the
    same tree relabelled by ``numbering``. Ladder operators act on qubits in
    Bravyi-Kitaev order and are listed by mode.
    """
    if m < 1 or m & (m - 1) or m > MAX_BK_MODES:
        raise ValueError(f"m must be a power of two no larger than {MAX_BK_MODES}, got {m}")
    tree = QubitTree(0) if m == 1 else build_xz_binary(m.bit_length() - 1)
    numbering = {0: 0} if m == 1 else bk_numbering(m)
    bk_tree = tree.relabel(numbering)
    return BravyiKitaev(tree, numbering, ladder_xz(bk_tree), bk_tree)


class StubFactors(NamedTuple):
    phase: int
    z_nodes: tuple[int, ...]
    x_nodes: tuple[int, ...]


def stub_factors(tree: QubitTree, node: int) -> StubFactors:
    """Split the stub of ``node`` in an x-z tree into ``i**phase * Z_C * X_U``."""
    r = stub(tree, node)
    if r.x & r.z:
        raise TreeError("stub contains Y; not an x-z tree path")
    z_nodes = tuple(tree.nodes[k] for k in r.support if r.letter(k) == "Z")
    x_nodes = tuple(tree.nodes[k] for k in r.support if r.letter(k) == "X")
    return StubFactors(r.phase, z_nodes, x_nodes)
