"""Reference evaluator: build the element tree, then search it.

Deliberately simple and independent of the compiler: it never looks at
regex IR, forests or datapaths, only at the parsed profile and the tree.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .errors import MalformedDocument
from .profile import Axis, ProfileAst
from .simulator import MatchEvent

_TAG = re.compile(rb"<(/?)([a-z][0-9])>")


@dataclass(eq=False)
class Node:
    tag: str
    start: int  # offset of '<' of the open tag
    open_end: int  # offset of '>' of the open tag
    end: int = -1  # one past the '>' of the close tag
    parent: "Node | None" = field(default=None, repr=False)
    children: list["Node"] = field(default_factory=list, repr=False)

    @property
    def span(self) -> tuple[int, int]:
        return self.start, self.end

    def ancestors(self):
        node = self.parent
        while node is not None:
            yield node
            node = node.parent


@dataclass
class ElementTree:
    roots: list[Node]
    nodes: list[Node]  # document order
    by_tag: dict[str, list[Node]] = field(default_factory=dict, repr=False)

    def __post_init__(self):
        for node in self.nodes:
            self.by_tag.setdefault(node.tag, []).append(node)


def parse_tree(doc: bytes) -> ElementTree:
    roots: list[Node] = []
    nodes: list[Node] = []
    open_path: list[Node] = []
    pos = 0
    while True:
        lt = doc.find(b"<", pos)
        if lt == -1:
            break
        m = _TAG.match(doc, lt)
        if m is None:
            raise MalformedDocument("not an encoded tag", lt)
        code = m.group(2).decode("ascii")
        if m.group(1):
            if not open_path or open_path[-1].tag != code:
                raise MalformedDocument(f"unexpected </{code}>", lt)
            open_path.pop().end = m.end()
        else:
            parent = open_path[-1] if open_path else None
            node = Node(code, lt, m.end() - 1, parent=parent)
            (parent.children if parent else roots).append(node)
            nodes.append(node)
            open_path.append(node)
        pos = m.end()
    if open_path:
        raise MalformedDocument(f"unclosed <{open_path[-1].tag}>", len(doc))
    return ElementTree(roots, nodes)


def evaluate(tree: ElementTree, ast: ProfileAst) -> tuple[bool, list[tuple[int, int]]]:
    """Whether ``ast`` selects a node, plus the witness path with the earliest final node."""
    steps = ast.steps
    first = steps[0]
    pool = tree.roots if first.axis is Axis.CHILD else tree.nodes
    # candidates for step i: node -> witness predecessor
    current = {n: None for n in pool if n.tag == first.tag}
    back = [current]
    for step in steps[1:]:
        nxt = {}
        for node in tree.by_tag.get(step.tag, ()):
            if step.axis is Axis.CHILD:
                if node.parent is not None and node.parent in current:
                    nxt[node] = node.parent
            else:
                for anc in node.ancestors():
                    if anc in current:
                        nxt[node] = anc
                        break
        current = nxt
        back.append(current)
        if not current:
            return False, []
    if not current:
        return False, []
    final = min(current, key=lambda n: n.start)
    path = [final]
    for level in range(len(back) - 1, 0, -1):
        path.append(back[level][path[-1]])
    return True, [n.span for n in reversed(path)]


def match_document(doc: bytes, profiles: list[ProfileAst], doc_id: object = 0) -> list[MatchEvent]:
    """Same record shape as the simulator: offset of the final open tag's ``>``."""
    tree = parse_tree(doc)
    by_start = {n.start: n for n in tree.nodes}
    events = []
    for ast in profiles:
        ok, witness = evaluate(tree, ast)
        if ok:
            events.append(MatchEvent(doc_id, ast.profile_id, by_start[witness[-1][0]].open_end))
    events.sort(key=lambda e: (e.byte_offset, e.profile_id))
    return events
