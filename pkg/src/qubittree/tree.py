"""Qubit trees and the anticommuting generator sets they carry.

Every node of a rooted tree is a qubit; edges are labelled ``x``, ``y`` or
``z`` with at most one child per label. A node's stub is ``i`` times the
Pauli letters read along the path from the root to its parent, and each label
left free at a node emits one generator ``stub(j) * sigma_j^label``.
A tree with ``m`` nodes always emits ``2m + 1`` generators.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from typing import Iterable, Mapping

from .pauli import PauliTerm, anticommutes, product

LABELS = ("x", "y", "z")
_LETTER = {"x": "X", "y": "Y", "z": "Z"}


class TreeError(ValueError):
    """Structural problem with a tree or a tree description."""


class GeneratorSetError(ValueError):
    """A generator set violated one of its algebraic laws."""


class QubitTree:
    """Rooted tree with labelled edges; immutable after construction.

    Node ids are arbitrary non-negative integers. Qubit positions in Pauli
    words follow ascending node id.
    """

    __slots__ = ("root", "_children", "_parent", "nodes", "_position")

    def __init__(self, root: int, edges: Iterable[tuple[int, int, str]] = ()):
        children: dict[int, dict[str, int]] = {root: {}}
        parent: dict[int, tuple[int, str]] = {}
        for p, c, label in edges:
            if label not in LABELS:
                raise TreeError(f"edge {p}->{c}: bad label {label!r}")
            if c == root:
                raise TreeError(f"edge {p}->{c}: root cannot have a parent")
            if c in parent:
                raise TreeError(f"node {c} has two parents")
            slot = children.setdefault(p, {})
            if label in slot:
                raise TreeError(f"node {p} has two {label}-children")
            slot[label] = c
            children.setdefault(c, {})
            parent[c] = (p, label)
        # reachability from the root rules out cycles and forests
        seen = {root}
        stack = [root]
        while stack:
            for c in children[stack.pop()].values():
                seen.add(c)
                stack.append(c)
        if len(seen) != len(children):
            missing = sorted(set(children) - seen)
            raise TreeError(f"nodes not reachable from root {root}: {missing}")
        self.root = root
        self._children = {k: dict(sorted(v.items())) for k, v in children.items()}
        self._parent = parent
        self.nodes: tuple[int, ...] = tuple(sorted(children))
        self._position = {j: k for k, j in enumerate(self.nodes)}

    # structure ------------------------------------------------------------
    @property
    def m(self) -> int:
        return len(self.nodes)

    @property
    def edges(self) -> tuple[tuple[int, int, str], ...]:
        return tuple(
            (p, c, label)
            for p in self.nodes
            for label, c in self._children[p].items()
        )

    def __contains__(self, node) -> bool:
        return node in self._children

    def __eq__(self, other) -> bool:
        if not isinstance(other, QubitTree):
            return NotImplemented
        return self.root == other.root and set(self.edges) == set(other.edges)

    def __hash__(self):
        return hash((self.root, frozenset(self.edges)))

    def __repr__(self) -> str:
        return f"QubitTree(root={self.root}, m={self.m}, edges={list(self.edges)})"

    def _require(self, node: int):
        if node not in self._children:
            raise TreeError(f"unknown node {node}")

    def children(self, node: int) -> dict[str, int]:
        self._require(node)
        return dict(self._children[node])

    def child(self, node: int, label: str) -> int | None:
        self._require(node)
        return self._children[node].get(label)

    def parent(self, node: int) -> tuple[int, str] | None:
        self._require(node)
        return self._parent.get(node)

    def position(self, node: int) -> int:
        self._require(node)
        return self._position[node]

    def path(self, node: int) -> list[tuple[int, str]]:
        """``(ancestor, label)`` steps from the root down to ``node``."""
        self._require(node)
        steps = []
        while node in self._parent:
            p, label = self._parent[node]
            steps.append((p, label))
            node = p
        return steps[::-1]

    def level(self, node: int) -> int:
        return len(self.path(node)) + 1

    def subtree(self, node: int) -> list[int]:
        self._require(node)
        out, stack = [], [node]
        while stack:
            j = stack.pop()
            out.append(j)
            stack.extend(self._children[j].values())
        return sorted(out)

    def descendants(self, node: int) -> list[int]:
        return [j for j in self.subtree(node) if j != node]

    def labels(self) -> set[str]:
        return {label for _, _, label in self.edges}

    def is_terminal(self, node: int) -> bool:
        self._require(node)
        return not self._children[node]

    def relabel(self, mapping: Mapping[int, int]) -> QubitTree:
        return QubitTree(mapping[self.root], [(mapping[p], mapping[c], lb) for p, c, lb in self.edges])

    # serialization --------------------------------------------------------
    def to_dict(self) -> dict:
        return {"m": self.m, "root": self.root, "edges": [list(e) for e in self.edges]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: Mapping) -> QubitTree:
        for key in ("m", "root", "edges"):
            if key not in data:
                raise TreeError(f"tree description missing field {key!r}")
        edges = []
        for k, e in enumerate(data["edges"]):
            if not (isinstance(e, (list, tuple)) and len(e) == 3):
                raise TreeError(f"edges[{k}]: expected [parent, child, label], got {e!r}")
            p, c, label = e
            if not (isinstance(p, int) and isinstance(c, int)):
                raise TreeError(f"edges[{k}]: node ids must be integers")
            edges.append((p, c, label))
        tree = cls(data["root"], edges)
        if tree.m != data["m"]:
            raise TreeError(f"field 'm' is {data['m']} but edges describe {tree.m} nodes")
        return tree

    @classmethod
    def from_json(cls, text: str) -> QubitTree:
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise TreeError(f"line {exc.lineno}: {exc.msg}") from None
        if not isinstance(data, dict):
            raise TreeError("tree description must be a JSON object")
        return cls.from_dict(data)


# builders -----------------------------------------------------------------

def _check_levels(levels: int):
    if levels < 1:
        raise ValueError(f"number of levels must be >= 1, got {levels}")


def build_cf_ternary(levels: int) -> QubitTree:
    """Complete full ternary tree, ``(3**levels - 1) / 2`` nodes in level order."""
    _check_levels(levels)
    m = (3**levels - 1) // 2
    edges = []
    for j in range(1, (3 ** (levels - 1) - 1) // 2 + 1):
        for k, label in enumerate(LABELS):
            edges.append((j, 3 * j - 1 + k, label))
    tree = QubitTree(1, edges)
    assert tree.m == m
    return tree


def build_cf_binary(levels: int) -> QubitTree:
    """Complete full x-y tree; node ``j`` has children ``2j`` (x), ``2j+1`` (y)."""
    _check_levels(levels)
    edges = []
    for j in range(1, 2 ** (levels - 1)):
        edges.append((j, 2 * j, "x"))
        edges.append((j, 2 * j + 1, "y"))
    return QubitTree(1, edges)


def build_xz_binary(levels: int, zero_root: bool = True) -> QubitTree:
    """Complete full x-z tree; ``j`` has children ``2j`` (x), ``2j+1`` (z).

    With ``zero_root`` an extra root 0 is attached to node 1 by an x-edge,
    giving ``2**levels`` nodes.
    """
    _check_levels(levels)
    edges = [(0, 1, "x")] if zero_root else []
    for j in range(1, 2 ** (levels - 1)):
        edges.append((j, 2 * j, "x"))
        edges.append((j, 2 * j + 1, "z"))
    return QubitTree(0 if zero_root else 1, edges)


def build_jw_chain(modes: int) -> QubitTree:
    if modes < 1:
        raise ValueError(f"chain needs at least one node, got {modes}")
    return QubitTree(1, [(j, j + 1, "z") for j in range(1, modes)])


def cf_binary_levels(tree: QubitTree) -> int | None:
    """Number of levels if ``tree`` is exactly ``build_cf_binary(levels)``."""
    m = tree.m
    levels = m.bit_length()
    if m != 2**levels - 1 or tree.root != 1:
        return None
    return levels if tree == build_cf_binary(levels) else None


def prune(tree: QubitTree, node: int) -> QubitTree:
    """Delete ``node`` and its whole subtree."""
    if node not in tree:
        raise TreeError(f"unknown node {node}")
    if node == tree.root:
        raise TreeError("cannot prune the root")
    gone = set(tree.subtree(node))
    return QubitTree(tree.root, [e for e in tree.edges if e[1] not in gone])


# generators ---------------------------------------------------------------

def stub(tree: QubitTree, node: int) -> PauliTerm:
    """``i`` times the Pauli letters on the root-to-parent path of ``node``."""
    sites = [(tree.position(p), _LETTER[label]) for p, label in tree.path(node)]
    return PauliTerm.from_sites(tree.m, sites, phase=1)


def _generator(tree: QubitTree, node: int, label: str, stubs=None) -> PauliTerm:
    r = stubs[node] if stubs is not None else stub(tree, node)
    return r * PauliTerm.single(tree.m, tree.position(node), _LETTER[label])


def all_stubs(tree: QubitTree) -> dict[int, PauliTerm]:
    """Stubs of every node, built top-down in one pass."""
    out = {tree.root: PauliTerm.identity(tree.m, phase=1)}
    stack = [tree.root]
    while stack:
        j = stack.pop()
        for label, c in tree.children(j).items():
            out[c] = out[j] * PauliTerm.single(tree.m, tree.position(j), _LETTER[label])
            stack.append(c)
    return out


@dataclass(frozen=True)
class GeneratorSet:
    tree: QubitTree
    generators: tuple[PauliTerm, ...]
    origins: tuple[tuple[int, str], ...]

    def __len__(self):
        return len(self.generators)

    def __iter__(self):
        return iter(self.generators)

    def __getitem__(self, k):
        return self.generators[k]

    @property
    def width(self) -> int:
        return self.tree.m

    def index_of(self, node: int, label: str) -> int:
        """0-based list index of the generator emitted at ``(node, label)``."""
        return self.origins.index((node, label))

    def by_origin(self, node: int, label: str) -> PauliTerm:
        return self.generators[self.index_of(node, label)]

    def product_phase(self) -> int | None:
        """Phase ``q`` with prod(generators) = i**q * I, or None if not scalar."""
        p = product(self.generators)
        return p.phase if p.is_identity() else None

    def validate(self) -> None:
        m = self.tree.m
        if len(self.generators) != 2 * m + 1:
            raise GeneratorSetError(f"{len(self.generators)} generators for m={m}, expected {2 * m + 1}")
        for (a, ga), (b, gb) in itertools.combinations(enumerate(self.generators), 2):
            if not anticommutes(ga, gb):
                raise GeneratorSetError(f"generators {a} ({ga}) and {b} ({gb}) commute")
        if self.product_phase() is None:
            raise GeneratorSetError("product of all generators is not a multiple of the identity")


def _binary_order(tree: QubitTree, levels: int) -> list[tuple[int, str]]:
    # z-generators of every node first, then x/y of leaves at indices 2j, 2j+1
    m = 2**levels - 1
    order = [(j, "z") for j in range(1, m + 1)]
    for j in range(2 ** (levels - 1), m + 1):
        order += [(j, "x"), (j, "y")]
    return order


def generators(tree: QubitTree) -> GeneratorSet:
    """Emit the ``2m + 1`` generators of ``tree``.

    Complete binary x-y trees use the consecutive indexing where list index
    ``k`` (0-based) holds generator ``k + 1`` of that scheme; every other tree,
    including a single node, is ordered by ``(node id, label)``.
    """
    stubs = all_stubs(tree)
    levels = cf_binary_levels(tree)
    # a single node keeps the plain x, y, z order
    if levels is not None and levels > 1:
        origins = _binary_order(tree, levels)
    else:
        origins = [
            (j, label)
            for j in tree.nodes
            for label in LABELS
            if tree.child(j, label) is None
        ]
    gens = tuple(_generator(tree, j, label, stubs) for j, label in origins)
    return GeneratorSet(tree, gens, tuple(origins))


def extend_odd(gs: GeneratorSet) -> list[PauliTerm]:
    """Prefix every generator with Z on a new leading qubit."""
    return [PauliTerm(g.width + 1, g.x << 1, (g.z << 1) | 1, g.phase) for g in gs]


def extend_spin_even(gs: GeneratorSet) -> list[PauliTerm]:
    """``X (x) g_j`` for every generator plus ``Y (x) I`` on a new leading qubit."""
    if gs.width == 1:
        raise ValueError(
            "even extension needs m > 1: for a single qubit g1*g2 is proportional to g3, "
            "so the quadratic elements are not independent"
        )
    out = [PauliTerm(g.width + 1, (g.x << 1) | 1, g.z << 1, g.phase) for g in gs]
    out.append(PauliTerm(gs.width + 1, 1, 1))
    return out


def reachable_words(terms: list[PauliTerm]) -> set[tuple[int, int]]:
    """Pauli words (phase dropped) reached by products of subsets of ``terms``."""
    words = {(0, 0)}
    for t in terms:
        words |= {(x ^ t.x, z ^ t.z) for x, z in words}
    return words


def spans_pauli_basis(gs: GeneratorSet) -> bool:
    if gs.width > 4:
        raise ValueError("basis-completeness check is capped at 4 qubits")
    return len(reachable_words(list(gs))) == 4**gs.width
