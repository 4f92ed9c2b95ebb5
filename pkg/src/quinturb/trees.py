"""Five-ary interaction trees: enumeration, addressing, node order, labels.

A tree is either a leaf or a node with exactly five children.  A tree with
``n`` nodes has ``4 n + 1`` leaves; leaves carry momenta (exact integers ``m``
standing for ``m / L``), nodes carry derived labels:

* momentum label  — alternating sum ``c1 - c2 + c3 - c4 + c5`` of child labels;
* frequency label — ``label^2 - c1^2 + c2^2 - c3^2 + c4^2 - c5^2`` at the node,
  carried up the tree with a sign flip under even child slots (stored as exact
  integers over ``L^2``).

Admissibility applies two cutoffs at *every* node, compared in exact
integer/rational arithmetic: the child-difference cutoff ``|c4 - c5| >= 1/mu``
and the frequency cutoff ``|Omega| >= 1/nu``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Sequence

from .chaos import ChaosExpansion, ComplexGaussianIndexing, wick_product
from .util import DomainError, ResourceError, ceil_div_fraction

__all__ = [
    "QuinticTree",
    "LEAF",
    "NodeAddress",
    "LabelAssignment",
    "OmegaLabels",
    "enumerate_trees",
    "node_order",
    "linear_extensions",
    "sign_exponent",
    "momentum_labels",
    "omega_labels",
    "admissible",
    "amplitude_weight",
    "gaussian_word",
    "render_tree",
    "DEFAULT_TREE_CAP",
]

DEFAULT_TREE_CAP = 4


@dataclass(frozen=True)
class QuinticTree:
    """Leaf (``children is None``) or node with exactly five children."""

    children: tuple["QuinticTree", ...] | None = None

    def __post_init__(self) -> None:
        if self.children is not None and len(self.children) != 5:
            raise DomainError("a node must have exactly five children")

    @property
    def is_leaf(self) -> bool:
        return self.children is None

    @property
    def node_count(self) -> int:
        if self.is_leaf:
            return 0
        return 1 + sum(c.node_count for c in self.children)

    @property
    def leaf_count(self) -> int:
        if self.is_leaf:
            return 1
        return sum(c.leaf_count for c in self.children)

    def sort_key(self) -> tuple[int, ...]:
        """Flattened preorder key; leaf sorts before node, then recursively."""
        if self.is_leaf:
            return (0,)
        out: list[int] = [1]
        for c in self.children:
            out.extend(c.sort_key())
        return tuple(out)


LEAF = QuinticTree()


def render_tree(tree: QuinticTree) -> str:
    if tree.is_leaf:
        return "⊥"
    return "(" + ",".join(render_tree(c) for c in tree.children) + ")"


@lru_cache(maxsize=None)
def _trees_with_nodes(n: int) -> tuple[QuinticTree, ...]:
    if n == 0:
        return (LEAF,)
    out: list[QuinticTree] = []
    for split in _compositions(n - 1, 5):
        pools = [_trees_with_nodes(m) for m in split]
        _product_trees(pools, 0, [], out)
    out.sort(key=QuinticTree.sort_key)
    return tuple(out)


def _compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    if parts == 1:
        yield (total,)
        return
    for head in range(total + 1):
        for rest in _compositions(total - head, parts - 1):
            yield (head,) + rest


def _product_trees(pools, i, acc, out) -> None:
    if i == len(pools):
        out.append(QuinticTree(tuple(acc)))
        return
    for tree in pools[i]:
        acc.append(tree)
        _product_trees(pools, i + 1, acc, out)
        acc.pop()


def enumerate_trees(n: int, cap: int = DEFAULT_TREE_CAP) -> tuple[QuinticTree, ...]:
    """All distinct trees with ``n`` nodes, in canonical order."""
    if n < 0:
        raise DomainError("node count must be non-negative")
    if n > cap:
        raise ResourceError(f"tree enumeration capped at {cap} nodes (asked {n})")
    return _trees_with_nodes(n)


# ---------------------------------------------------------------------------
# addresses
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class NodeAddress:
    """Path of child slots (1-based) from the root; flags node vs leaf."""

    path: tuple[int, ...]
    is_node: bool = True

    def parent(self) -> "NodeAddress":
        if not self.path:
            raise DomainError("the root has no parent")
        return NodeAddress(self.path[:-1], True)

    def render(self) -> str:
        if self.is_node:
            if not self.path:
                return "0"
            return "(" + ",".join(map(str, self.path)) + ",0)"
        return "(" + ",".join(map(str, self.path)) + ")"

    def __str__(self) -> str:  # pragma: no cover - cosmetic
        return self.render()


def _resolve(tree: QuinticTree, path: tuple[int, ...]) -> QuinticTree | None:
    cur = tree
    for slot in path:
        if cur.is_leaf or not 1 <= slot <= 5:
            return None
        cur = cur.children[slot - 1]
    return cur


def node_addresses(tree: QuinticTree) -> list[NodeAddress]:
    """All node addresses, sorted by path."""
    out: list[NodeAddress] = []

    def walk(t: QuinticTree, path: tuple[int, ...]) -> None:
        if t.is_leaf:
            return
        out.append(NodeAddress(path, True))
        for j, c in enumerate(t.children, start=1):
            walk(c, path + (j,))

    walk(tree, ())
    out.sort(key=lambda a: a.path)
    return out


def leaf_addresses(tree: QuinticTree) -> list[NodeAddress]:
    """Leaf addresses in left-to-right order."""
    out: list[NodeAddress] = []

    def walk(t: QuinticTree, path: tuple[int, ...]) -> None:
        if t.is_leaf:
            out.append(NodeAddress(path, False))
            return
        for j, c in enumerate(t.children, start=1):
            walk(c, path + (j,))

    walk(tree, ())
    return out


def all_addresses(tree: QuinticTree) -> list[NodeAddress]:
    return node_addresses(tree) + leaf_addresses(tree)


# ---------------------------------------------------------------------------
# the parenthood order and its linear extensions
# ---------------------------------------------------------------------------


def node_order(tree: QuinticTree, l1: NodeAddress, l2: NodeAddress) -> str:
    """Compare two node addresses under the parenthood order.

    ``l1`` precedes ``l2`` ("less") when ``l2`` is a strict ancestor of
    ``l1``: descendants come first, the root last.
    """
    for addr in (l1, l2):
        sub = _resolve(tree, addr.path)
        if not addr.is_node or sub is None or sub.is_leaf:
            raise DomainError(f"{addr.render()} is not a node address of this tree")
    if l1.path == l2.path:
        return "equal"
    if l1.path[: len(l2.path)] == l2.path:
        return "less"
    if l2.path[: len(l1.path)] == l1.path:
        return "greater"
    return "incomparable"


def linear_extensions(
    tree: QuinticTree, cap: int = DEFAULT_TREE_CAP
) -> tuple[tuple[NodeAddress, ...], ...]:
    """All total orders of the nodes compatible with parenthood.

    Each extension lists node addresses from first (innermost) to last (always
    the root); candidates are tried in canonical address order, so the output
    order is deterministic.
    """
    nodes = node_addresses(tree)
    n = len(nodes)
    if n > cap:
        raise ResourceError(f"linear extensions capped at {cap} nodes (got {n})")
    children_of: dict[tuple[int, ...], list[NodeAddress]] = {a.path: [] for a in nodes}
    for a in nodes:
        if a.path:
            children_of[a.path[:-1]].append(a)

    out: list[tuple[NodeAddress, ...]] = []
    placed: set[tuple[int, ...]] = set()
    chain: list[NodeAddress] = []

    def extend() -> None:
        if len(chain) == n:
            out.append(tuple(chain))
            return
        for a in nodes:
            if a.path in placed:
                continue
            if any(c.path not in placed for c in children_of[a.path]):
                continue
            placed.add(a.path)
            chain.append(a)
            extend()
            chain.pop()
            placed.remove(a.path)

    extend()
    return tuple(out)


def sign_exponent(tree: QuinticTree) -> int:
    """Recursion: 0 at a leaf; 1 - sum_j (-1)^j N_j over child slots j."""
    if tree.is_leaf:
        return 0
    total = 1
    for j, c in enumerate(tree.children, start=1):
        total -= (-1) ** j * sign_exponent(c)
    return total


# ---------------------------------------------------------------------------
# labels
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LabelAssignment:
    """Leaf momenta (exact integers ``m``, momenta ``m / L``), left to right."""

    k_vec: tuple[int, ...]
    lattice_size: int

    def __post_init__(self) -> None:
        if self.lattice_size <= 0:
            raise DomainError("lattice size must be positive")


@dataclass(frozen=True)
class OmegaLabels:
    """Node -> exact frequency numerator (value = numerator / L^2)."""

    values: dict[NodeAddress, int]
    lattice_size: int


def _check_length(tree: QuinticTree, assignment: LabelAssignment) -> None:
    expected = tree.leaf_count
    if len(assignment.k_vec) != expected:
        raise DomainError(
            f"assignment length {len(assignment.k_vec)} != leaf count {expected}"
        )


def momentum_labels(
    tree: QuinticTree, assignment: LabelAssignment
) -> dict[NodeAddress, int]:
    """Labels for every address: leaves get their momenta in order, each node
    the alternating sum ``c1 - c2 + c3 - c4 + c5`` of its child labels."""
    _check_length(tree, assignment)
    labels: dict[NodeAddress, int] = {}
    feed = iter(assignment.k_vec)

    def walk(t: QuinticTree, path: tuple[int, ...]) -> int:
        if t.is_leaf:
            m = next(feed)
            labels[NodeAddress(path, False)] = m
            return m
        kids = [walk(c, path + (j,)) for j, c in enumerate(t.children, start=1)]
        m = kids[0] - kids[1] + kids[2] - kids[3] + kids[4]
        labels[NodeAddress(path, True)] = m
        return m

    walk(tree, ())
    return labels


def omega_labels(tree: QuinticTree, assignment: LabelAssignment) -> OmegaLabels:
    """Frequency labels (exact numerators over L^2) for every node.

    Local value at a node with label ``k`` and child labels ``c``:
    ``k^2 - c1^2 + c2^2 - c3^2 + c4^2 - c5^2``; carried toward the root with a
    sign flip for every even slot along the path.
    """
    _check_length(tree, assignment)
    labels = momentum_labels(tree, assignment)
    out: dict[NodeAddress, int] = {}

    def walk(t: QuinticTree, path: tuple[int, ...]) -> None:
        if t.is_leaf:
            return
        addr = NodeAddress(path, True)
        k = labels[addr]
        local = k * k
        sign = 1
        for j, c in enumerate(t.children, start=1):
            child_addr = NodeAddress(path + (j,), not c.is_leaf)
            cm = labels[child_addr]
            local -= sign * cm * cm
            sign = -sign
        path_sign = 1
        for slot in path:
            if slot % 2 == 0:
                path_sign = -path_sign
        out[addr] = path_sign * local
        for j, c in enumerate(t.children, start=1):
            walk(c, path + (j,))

    walk(tree, ())
    return OmegaLabels(out, assignment.lattice_size)


def admissible(
    tree: QuinticTree,
    assignment: LabelAssignment,
    k: int,
    mu,
    nu,
) -> bool:
    """Exact admissibility: root label equals ``k`` and every node passes both
    cutoffs ``|c4 - c5| >= 1/mu`` and ``|Omega| >= 1/nu`` (momenta are
    ``m / L``, frequencies ``d / L^2``; comparisons are integer against exact
    rational thresholds)."""
    _check_length(tree, assignment)
    labels = momentum_labels(tree, assignment)
    L = assignment.lattice_size
    if labels[NodeAddress((), not tree.is_leaf)] != k:
        return False
    m_min = ceil_div_fraction(L, mu)
    d_min = ceil_div_fraction(L * L, nu)

    def walk(t: QuinticTree, path: tuple[int, ...]) -> bool:
        if t.is_leaf:
            return True
        kids = [
            labels[NodeAddress(path + (j,), not c.is_leaf)]
            for j, c in enumerate(t.children, start=1)
        ]
        if abs(kids[3] - kids[4]) < m_min:
            return False
        me = labels[NodeAddress(path, True)]
        local = (
            me * me
            - kids[0] * kids[0]
            + kids[1] * kids[1]
            - kids[2] * kids[2]
            + kids[3] * kids[3]
            - kids[4] * kids[4]
        )
        if abs(local) < d_min:
            return False
        return all(walk(c, path + (j,)) for j, c in enumerate(t.children, start=1))

    return walk(tree, ())


# ---------------------------------------------------------------------------
# leaf weights
# ---------------------------------------------------------------------------


def amplitude_weight(profile, assignment: LabelAssignment) -> complex:
    """Product of profile values over leaves: plain at odd positions,
    conjugated at even positions."""
    L = assignment.lattice_size
    out = complex(1.0)
    for j, m in enumerate(assignment.k_vec, start=1):
        v = complex(profile.evaluate(m / L))
        out *= v if j % 2 == 1 else v.conjugate()
    return out


_WORD_CACHE: dict[tuple, ChaosExpansion] = {}


def gaussian_word(
    assignment: LabelAssignment,
    idx: ComplexGaussianIndexing | None = None,
) -> ChaosExpansion:
    """Wick product of one complex Gaussian per leaf (conjugated at even
    positions), expanded into real-Gaussian chaos coefficients.

    The result depends only on the multiset of (momentum, conjugation-flag)
    factors, which is what the cache keys on.
    """
    idx = idx or ComplexGaussianIndexing()
    L = assignment.lattice_size
    odd = tuple(sorted(m for j, m in enumerate(assignment.k_vec, start=1) if j % 2 == 1))
    even = tuple(sorted(m for j, m in enumerate(assignment.k_vec, start=1) if j % 2 == 0))
    key = (L, idx.normalization, odd, even)
    hit = _WORD_CACHE.get(key)
    if hit is not None:
        return hit
    word: ChaosExpansion | None = None
    for m in odd:
        factor = idx.gaussian_factor(L, m, conjugate=False)
        word = factor if word is None else wick_product(word, factor)
    for m in even:
        factor = idx.gaussian_factor(L, m, conjugate=True)
        word = wick_product(word, factor) if word is not None else factor
    _WORD_CACHE[key] = word
    return word
