"""Block-level hardware model compiled from a prefix forest.

Area is counted in comparator bits: a tag matcher over an ``n``-byte tag costs
``8 * n`` bits when it compares raw bytes and ``n`` bits when it reads the
shared 256-line character decoder. Blocks the comparator model does not
cover (stack, tag filter, TOS matchers, encoders) get fixed constants that are
reported per kind.
"""

from __future__ import annotations

import enum
import json
from collections import Counter, deque
from dataclasses import dataclass, field

from .dictionary import close_tag, open_tag
from .errors import EmptyForest
from .regex import (
    NegationGuard,
    OpenTagMatch,
    PrefixForest,
    PrefixNode,
    StackCheck,
    StackRegexIr,
    expand_forest,
)

DECODER_AREA = 256
TOS_AREA = 16
FILTER_AREA = 64
STACK_BITS_PER_ENTRY = 16
RESULT_CELL_AREA = 0
DEFAULT_MAX_DEPTH = 64

# Pseudo block id of the 8-bit document input port.
STREAM = -1


class Kind(enum.Enum):
    CHAR_DECODER = "char_decoder"
    TAG_MATCHER = "tag_matcher"
    NEGATION = "negation_block"
    TAG_FILTER = "tag_filter"
    STACK = "stack_block"
    TOS_MATCHER = "tos_matcher"
    RESULT_CELL = "result_cell"
    PRIORITY_ENCODER = "priority_encoder"


class Group(enum.Enum):
    NO_STACK = "nostack"
    STACK = "stack"


def comparator_bits(pattern: bytes, decoded: bool) -> int:
    return len(pattern) if decoded else 8 * len(pattern)


@dataclass(frozen=True)
class Block:
    block_id: int
    kind: Kind
    ports: tuple  # ((port_name, source_block_id), ...)
    area_bits: int
    pattern: bytes | None = None  # matcher / negation comparator pattern
    code: str | None = None  # tag code the block is about
    decoded: bool = False
    anchored: bool = False
    max_depth: int | None = None
    profile_id: int | None = None
    group: Group | None = None

    @property
    def inputs(self) -> tuple[int, ...]:
        return tuple(src for _, src in self.ports)

    def port(self, name: str) -> int | None:
        for port, src in self.ports:
            if port == name:
                return src
        return None

    def describe(self) -> str:
        k = self.kind
        if k in (Kind.TAG_MATCHER, Kind.NEGATION):
            return f"{k.value}({self.pattern.decode('ascii')})"
        if k is Kind.TOS_MATCHER:
            return f"{k.value}({self.code})"
        if k is Kind.RESULT_CELL:
            return f"{k.value}(P{self.profile_id})"
        if k is Kind.PRIORITY_ENCODER:
            return f"{k.value}({self.group.value})"
        if k is Kind.STACK:
            return f"{k.value}(depth={self.max_depth})"
        return k.value


@dataclass(frozen=True)
class DatapathConfig:
    prefix_shared: bool = False
    char_decoded: bool = False
    max_depth: int = DEFAULT_MAX_DEPTH

    def __post_init__(self):
        if self.max_depth < 1:
            raise ValueError("max_depth must be positive")

    @property
    def name(self) -> str:
        base = "Com-P" if self.prefix_shared else "Unop"
        return base + ("-CharDec" if self.char_decoded else "")

    @classmethod
    def from_name(cls, name: str, max_depth: int = DEFAULT_MAX_DEPTH) -> "DatapathConfig":
        for cfg in SCENARIOS:
            if cfg.name.lower() == name.lower():
                return cls(cfg.prefix_shared, cfg.char_decoded, max_depth)
        raise ValueError(f"unknown configuration {name!r}")


SCENARIOS = (
    DatapathConfig(False, False),
    DatapathConfig(True, False),
    DatapathConfig(False, True),
    DatapathConfig(True, True),
)


@dataclass(frozen=True)
class Datapath:
    blocks: tuple[Block, ...]
    config: DatapathConfig
    profile_groups: dict = field(compare=False)  # profile_id -> Group

    def of_kind(self, kind: Kind) -> list[Block]:
        return [b for b in self.blocks if b.kind is kind]

    def block(self, block_id: int) -> Block:
        return self.blocks[block_id]

    def edges(self) -> list[tuple[int, int, str]]:
        """(source, sink, sink port) for every wire; the stack feedback included."""
        return [(src, b.block_id, port) for b in self.blocks for port, src in b.ports]

    def validate(self) -> None:
        counts = Counter(b.kind for b in self.blocks)
        if counts[Kind.PRIORITY_ENCODER] != 2:
            raise AssertionError("datapath needs exactly two priority encoders")
        if counts[Kind.TAG_FILTER] > 1 or counts[Kind.STACK] > 1:
            raise AssertionError("at most one tag filter and one stack per stream")
        if counts[Kind.TOS_MATCHER] and not counts[Kind.STACK]:
            raise AssertionError("TOS matchers without a stack")
        if (counts[Kind.CHAR_DECODER] == 1) != self.config.char_decoded or counts[Kind.CHAR_DECODER] > 1:
            raise AssertionError("decoder presence must follow the configuration")
        sinks: dict[int, list[int]] = {}
        for src, dst, _ in self.edges():
            sinks.setdefault(src, []).append(dst)
        seen = set()
        queue = deque([STREAM])
        while queue:
            for dst in sinks.get(queue.popleft(), ()):
                if dst not in seen:
                    seen.add(dst)
                    queue.append(dst)
        for cell in self.of_kind(Kind.RESULT_CELL):
            if cell.block_id not in seen:
                raise AssertionError(f"result cell for P{cell.profile_id} unreachable from the input")


class _Builder:
    def __init__(self, config: DatapathConfig, uses_stack: bool):
        self.config = config
        self.blocks: list[Block] = []
        self.cells: dict[Group, list[Block]] = {Group.NO_STACK: [], Group.STACK: []}
        self.source = STREAM
        if config.char_decoded:
            self.source = self.add(Kind.CHAR_DECODER, (("data", STREAM),), DECODER_AREA)
        self.stack = None
        if uses_stack:
            tag_filter = self.add(Kind.TAG_FILTER, (("data", STREAM),), FILTER_AREA)
            self.stack = self.add(
                Kind.STACK,
                (("tags", tag_filter),),
                config.max_depth * STACK_BITS_PER_ENTRY,
                max_depth=config.max_depth,
            )

    def add(self, kind: Kind, ports, area: int, **kw) -> int:
        block_id = len(self.blocks)
        self.blocks.append(Block(block_id, kind, tuple(ports), area, **kw))
        return block_id

    def matcher(self, pattern: bytes, code: str, ports, **kw) -> int:
        d = self.config.char_decoded
        return self.add(Kind.TAG_MATCHER, (("data", self.source),) + tuple(ports),
                        comparator_bits(pattern, d), pattern=pattern, code=code, decoded=d, **kw)

    def unit(self, unit: tuple, prev: int | None) -> int:
        head = unit[-1]
        assert isinstance(head, OpenTagMatch)
        if prev is None:
            return self.matcher(open_tag(head.tag), head.tag, (), anchored=not head.floating)
        ports = [("enable", prev)]
        guard = unit[1]
        assert isinstance(guard, NegationGuard)
        pattern = close_tag(guard.close_tag)
        d = self.config.char_decoded
        neg = self.add(Kind.NEGATION, (("data", self.source),), comparator_bits(pattern, d),
                       pattern=pattern, code=guard.close_tag, decoded=d)
        ports.append(("reset", neg))
        if isinstance(unit[-2], StackCheck):
            tos = self.add(Kind.TOS_MATCHER, (("stack", self.stack),), TOS_AREA, code=unit[-2].expected_tos)
            ports.append(("gate", tos))
        return self.matcher(open_tag(head.tag), head.tag, ports)

    def node(self, node: PrefixNode, prev: int | None, groups: dict) -> None:
        for unit in node.units():
            prev = self.unit(unit, prev)
        for pid in node.terminal_profiles:
            group = groups[pid]
            cell = self.add(Kind.RESULT_CELL, (("match", prev),), RESULT_CELL_AREA, profile_id=pid, group=group)
            self.cells[group].append(self.blocks[cell])
        for child in node.children:
            self.node(child, prev, groups)

    def encoders(self) -> None:
        for group in (Group.NO_STACK, Group.STACK):
            cells = sorted(self.cells[group], key=lambda b: b.profile_id)
            ports = tuple((f"in{k}", c.block_id) for k, c in enumerate(cells))
            self.add(Kind.PRIORITY_ENCODER, ports, len(ports), group=group)


def lower_to_datapath(forest: PrefixForest, config: DatapathConfig = DatapathConfig()) -> Datapath:
    """Instantiate the blocks for ``forest``.

    Without prefix sharing each profile gets its own matcher chain; with it,
    every forest node's chain is built once and feeds all of its children.
    """
    if not forest.trees:
        raise EmptyForest()
    irs: list[StackRegexIr] = expand_forest(forest)
    groups = {ir.profile_id: Group.STACK if ir.uses_stack else Group.NO_STACK for ir in irs}
    if not config.prefix_shared:
        forest = PrefixForest([PrefixNode(ir.atoms, [], [ir.profile_id]) for ir in irs])
    b = _Builder(config, any(g is Group.STACK for g in groups.values()))
    for tree in forest.trees:
        b.node(tree, None, groups)
    b.encoders()
    return Datapath(tuple(b.blocks), config, groups)


@dataclass(frozen=True)
class AreaReport:
    total_bits: int
    per_kind: dict
    block_count: int
    kind_counts: dict
    config: str

    def to_json(self) -> str:
        body = {
            "config": self.config,
            "total_bits": self.total_bits,
            "block_count": self.block_count,
            "per_kind": self.per_kind,
            "kind_counts": self.kind_counts,
        }
        return json.dumps(body, indent=2, sort_keys=True) + "\n"


def area_report(dp: Datapath) -> AreaReport:
    per_kind: Counter = Counter()
    counts: Counter = Counter()
    for block in dp.blocks:
        per_kind[block.kind.value] += block.area_bits
        counts[block.kind.value] += 1
    return AreaReport(
        total_bits=sum(b.area_bits for b in dp.blocks),
        per_kind=dict(sorted(per_kind.items())),
        block_count=len(dp.blocks),
        kind_counts=dict(sorted(counts.items())),
        config=dp.config.name,
    )
