"""Stack-enhanced regular-expression IR and common-prefix clustering.

A profile ``t1 ax2 t2 ... axk tk`` lowers to a flat atom list::

    OPEN(t1) [GAP NEG(/t1) TOS(t1)? OPEN(t2)] ... [GAP NEG(/tk-1) TOS(tk-1)? OPEN(tk)]

Each bracketed run is a *unit*: the search for one more tag below the
previous one. ``TOS`` is present exactly for child steps. Units are the
granularity at which profiles share hardware.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import groupby
from typing import Iterable, Union

from .profile import Axis, ProfileAst

# Inter-tag filler between two matched tags, written as a PCRE fragment.
GAP_REGEX = r"[\w\s]+[<\c\d>|</\c\d>]*"


@dataclass(frozen=True)
class OpenTagMatch:
    """Match ``<tag>``. ``floating`` marks a first tag that may occur at any depth."""

    tag: str
    floating: bool = False

    def __str__(self):
        return f"OPEN(//{self.tag})" if self.floating else f"OPEN({self.tag})"


@dataclass(frozen=True)
class GapPattern:
    def __str__(self):
        return "GAP"


@dataclass(frozen=True)
class NegationGuard:
    """Cancel the pending search when ``</close_tag>`` arrives."""

    close_tag: str

    def __str__(self):
        return f"NEG(/{self.close_tag})"


@dataclass(frozen=True)
class StackCheck:
    """The next open tag only counts if ``expected_tos`` is on top of the stack."""

    expected_tos: str

    def __str__(self):
        return f"TOS({self.expected_tos})"


RegexAtom = Union[OpenTagMatch, GapPattern, NegationGuard, StackCheck]
GAP = GapPattern()

Unit = tuple  # tuple[RegexAtom, ...]


def split_units(atoms: Iterable[RegexAtom]) -> list[Unit]:
    """Cut an atom run into units, each ending with an OpenTagMatch."""
    units, current = [], []
    for atom in atoms:
        current.append(atom)
        if isinstance(atom, OpenTagMatch):
            units.append(tuple(current))
            current = []
    if current:
        raise ValueError("atom run does not end with an OpenTagMatch")
    return units


def _check_units(atoms: tuple) -> None:
    units = split_units(atoms)
    head = units[0]
    if len(head) != 1:
        raise ValueError("IR must start with a bare OpenTagMatch")
    prev = head[0].tag
    for unit in units[1:]:
        expected = (GAP, NegationGuard(prev))
        if unit[:2] != expected or len(unit) not in (3, 4):
            raise ValueError(f"malformed unit {' '.join(map(str, unit))}")
        if len(unit) == 4 and unit[2] != StackCheck(prev):
            raise ValueError(f"stack check in unit {' '.join(map(str, unit))} must name {prev}")
        if unit[-1].floating:
            raise ValueError("only the first tag may be floating")
        prev = unit[-1].tag


def unit_xpath(unit: Unit, first: bool) -> str:
    open_atom = unit[-1]
    if first:
        return ("//" if open_atom.floating else "") + open_atom.tag
    sep = "/" if isinstance(unit[-2], StackCheck) else "//"
    return sep + open_atom.tag


@dataclass(frozen=True)
class StackRegexIr:
    profile_id: int
    atoms: tuple

    def __post_init__(self):
        object.__setattr__(self, "atoms", tuple(self.atoms))
        if not self.atoms:
            raise ValueError("empty IR")
        _check_units(self.atoms)

    @property
    def uses_stack(self) -> bool:
        return any(isinstance(a, StackCheck) for a in self.atoms)

    def units(self) -> list[Unit]:
        return split_units(self.atoms)

    def xpath(self) -> str:
        """The profile text recovered from the atoms; this is the sort key."""
        return "".join(unit_xpath(u, k == 0) for k, u in enumerate(self.units()))

    def dump(self) -> str:
        return f"P{self.profile_id}: " + " ".join(str(a) for a in self.atoms)

    def pcre(self) -> str:
        """Regex text with the ``[Stack1]`` directive before child-axis tags."""
        out = []
        for atom in self.atoms:
            if isinstance(atom, OpenTagMatch):
                out.append(f"<{atom.tag}>")
            elif isinstance(atom, GapPattern):
                out.append(GAP_REGEX)
            elif isinstance(atom, StackCheck):
                out.append("[Stack1]")
        return "".join(out)


def lower_profile(ast: ProfileAst) -> StackRegexIr:
    first = ast.steps[0]
    atoms: list = [OpenTagMatch(first.tag, floating=first.axis is Axis.DESCENDANT)]
    prev = first.tag
    for step in ast.steps[1:]:
        atoms += [GAP, NegationGuard(prev)]
        if step.axis is Axis.CHILD:
            atoms.append(StackCheck(prev))
        atoms.append(OpenTagMatch(step.tag))
        prev = step.tag
    return StackRegexIr(ast.profile_id, tuple(atoms))


def dump_irs(irs: Iterable[StackRegexIr]) -> str:
    return "".join(ir.dump() + "\n" for ir in sorted(irs, key=lambda ir: ir.profile_id))


@dataclass
class PrefixNode:
    shared_atoms: tuple
    children: list["PrefixNode"] = field(default_factory=list)
    terminal_profiles: list[int] = field(default_factory=list)

    def units(self) -> list[Unit]:
        return split_units(self.shared_atoms)

    def profile_count(self) -> int:
        return len(self.terminal_profiles) + sum(c.profile_count() for c in self.children)


@dataclass
class PrefixForest:
    trees: list[PrefixNode]

    def nodes(self):
        """Every node with its depth in units from the tree root (preorder)."""
        stack = [(t, 0) for t in reversed(self.trees)]
        while stack:
            node, depth = stack.pop()
            yield node, depth
            below = depth + len(node.units())
            stack.extend((c, below) for c in reversed(node.children))

    def shared_node_count(self) -> int:
        """Nodes whose logic serves more than one profile."""
        return sum(1 for node, _ in self.nodes() if node.profile_count() > 1)


def build_prefix_forest(irs: Iterable[StackRegexIr]) -> PrefixForest:
    """Cluster IRs into trees that instantiate each shared prefix once.

    The IRs are sorted by their xpath text; on the sorted list the common
    prefix of each group is extended one unit (one tag) at a time until the
    members diverge or one of them ends.
    """
    ordered = sorted(irs, key=lambda ir: (ir.xpath(), ir.profile_id))
    ids = [ir.profile_id for ir in ordered]
    if len(set(ids)) != len(ids):
        raise ValueError("profile ids must be unique")
    entries = [(ir.units(), ir.profile_id) for ir in ordered]
    return PrefixForest(_grow(entries, 0))


def _grow(entries: list, depth: int) -> list[PrefixNode]:
    nodes = []
    for _, run in groupby(entries, key=lambda e: e[0][depth]):
        group = list(run)
        end = depth + 1
        while all(len(units) > end for units, _ in group) and len({units[end] for units, _ in group}) == 1:
            end += 1
        head_units = group[0][0]
        shared = tuple(atom for unit in head_units[depth:end] for atom in unit)
        terminals = [pid for units, pid in group if len(units) == end]
        rest = [e for e in group if len(e[0]) > end]
        nodes.append(PrefixNode(shared, _grow(rest, end) if rest else [], terminals))
    return nodes


def expand_forest(forest: PrefixForest) -> list[StackRegexIr]:
    """Recover the clustered IRs, ordered by profile id."""
    out = []

    def walk(node: PrefixNode, prefix: tuple):
        atoms = prefix + node.shared_atoms
        out.extend(StackRegexIr(pid, atoms) for pid in node.terminal_profiles)
        for child in node.children:
            walk(child, atoms)

    for tree in forest.trees:
        walk(tree, ())
    return sorted(out, key=lambda ir: ir.profile_id)


def format_forest(forest: PrefixForest) -> str:
    lines = []

    def walk(node: PrefixNode, indent: int):
        atoms = " ".join(str(a) for a in node.shared_atoms)
        terms = ""
        if node.terminal_profiles:
            terms = " -> " + ",".join(f"P{p}" for p in node.terminal_profiles)
        shared = f"  (shared by {node.profile_count()})" if node.profile_count() > 1 else ""
        lines.append("  " * indent + f"[{atoms}]{terms}{shared}")
        for child in node.children:
            walk(child, indent + 1)

    for k, tree in enumerate(forest.trees):
        lines.append(f"tree {k}:")
        walk(tree, 1)
    lines.append(f"# {len(forest.trees)} trees, {forest.shared_node_count()} shared prefix nodes")
    return "\n".join(lines) + "\n"
