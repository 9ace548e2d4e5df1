"""Cycle-driven execution of a :class:`Datapath` over encoded XML bytes.

One input byte is consumed per simulated clock cycle. Within a cycle the
blocks are evaluated in a fixed order:

1. character decoder
2. tag filter (recognises a tag whose ``>`` arrives this cycle)
3. TOS matchers read the stack *before* this cycle's push/pop
4. matcher chains advance; negation blocks clear their segment
5. result cells fire into the two priority encoders
6. the stack commits the push or pop

The tag comparators are pure functions of a 4/5-byte input window, so their
outputs are computed for the whole document up front (data-parallel over
time, which is exactly what the parallel comparator banks do per cycle). All
state (segment flags, stack, fired profiles) is updated cycle by cycle.
"""

from __future__ import annotations

import csv
import io
import logging
import time
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .datapath import Datapath, Group, Kind
from .errors import MalformedDocument, StackOverflow, XPathHwError

log = logging.getLogger(__name__)

_LT, _GT, _SLASH = ord("<"), ord(">"), ord("/")
_LETTER = frozenset(range(ord("a"), ord("z") + 1))
_DIGIT = frozenset(range(ord("0"), ord("9") + 1))
# Gap text class: word characters and whitespace.
_GAP_CLASS = frozenset(
    list(range(ord("a"), ord("z") + 1)) + list(range(ord("A"), ord("Z") + 1))
    + list(range(ord("0"), ord("9") + 1)) + [ord("_"), ord(" "), ord("\t"), ord("\n"), ord("\r")]
)

# tag filter states
_TEXT, _AFTER_LT, _AFTER_SLASH, _FIRST_SYM, _SECOND_SYM = range(5)


@dataclass(frozen=True)
class MatchEvent:
    doc_id: object
    profile_id: int
    byte_offset: int


@dataclass(frozen=True)
class ThroughputStats:
    bytes: int
    wall_seconds: float
    mb_per_s: float

    def __str__(self):
        return f"bytes={self.bytes} wall_seconds={self.wall_seconds:.6f} mb_per_s={self.mb_per_s:.3f}"


@dataclass
class StreamResult:
    events: list[list[MatchEvent]]
    errors: list[XPathHwError | None]
    stats: ThroughputStats


class _TagFilter:
    """Byte-at-a-time recogniser for ``<xy>`` / ``</xy>``."""

    __slots__ = ("state", "closing", "sym", "start", "text_warnings")

    def __init__(self):
        self.state = _TEXT
        self.closing = False
        self.sym = 0
        self.start = 0
        self.text_warnings = 0

    def feed(self, b: int, cycle: int):
        """Advance one byte; return ``(closing, code)`` when a tag completes."""
        state = self.state
        if state == _TEXT:
            if b == _LT:
                self.state = _AFTER_LT
                self.start = cycle
            elif b not in _GAP_CLASS:
                self.text_warnings += 1
            return None
        if state == _AFTER_LT:
            if b == _SLASH:
                self.closing = True
                self.state = _AFTER_SLASH
                return None
            self.closing = False
            state = _AFTER_SLASH
        if state == _AFTER_SLASH:
            if b not in _LETTER:
                raise MalformedDocument("expected a tag code letter", cycle)
            self.sym = b << 8
            self.state = _FIRST_SYM
            return None
        if state == _FIRST_SYM:
            if b not in _DIGIT:
                raise MalformedDocument("expected a tag code digit", cycle)
            self.sym |= b
            self.state = _SECOND_SYM
            return None
        if b != _GT:
            raise MalformedDocument("expected '>' after a two-symbol tag", cycle)
        self.state = _TEXT
        return self.closing, chr(self.sym >> 8) + chr(self.sym & 0xFF)


class Engine:
    """Simulation kernel for one datapath; reusable across documents."""

    def __init__(self, dp: Datapath):
        self.dp = dp
        self.max_depth = dp.config.max_depth
        self.decoded = dp.config.char_decoded
        self.groups = dp.profile_groups

        matchers = dp.of_kind(Kind.TAG_MATCHER)
        self.n_matchers = len(matchers)
        slot = {b.block_id: k for k, b in enumerate(matchers)}
        patterns: dict[bytes, int] = {}

        def pattern_id(p: bytes) -> int:
            return patterns.setdefault(p, len(patterns))

        neg_targets: dict[int, list[int]] = {}
        self.heads: dict[int, list[tuple[int, bool]]] = {}
        self.units: dict[int, list[tuple[int, str | None]]] = {}
        self.successors: list[list[int]] = [[] for _ in matchers]
        for b in matchers:
            m = slot[b.block_id]
            p = pattern_id(b.pattern)
            enable = b.port("enable")
            if enable is None:
                self.heads.setdefault(p, []).append((m, b.anchored))
                continue
            self.successors[slot[enable]].append(m)
            gate = b.port("gate")
            tos = dp.block(gate).code if gate is not None else None
            self.units.setdefault(p, []).append((m, tos))
            neg_targets.setdefault(b.port("reset"), []).append(m)
        self.negs: dict[int, list[int]] = {}
        for b in dp.of_kind(Kind.NEGATION):
            self.negs.setdefault(pattern_id(b.pattern), []).extend(neg_targets.get(b.block_id, ()))
        self.cells: list[list[int]] = [[] for _ in matchers]
        for b in dp.of_kind(Kind.RESULT_CELL):
            self.cells[slot[b.port("match")]].append(b.profile_id)
        self.patterns = list(patterns)

    def comparator_outputs(self, doc: bytes) -> dict[int, list[int]]:
        """Cycle -> ids of the tag patterns whose comparator chain completes then."""
        arr = np.frombuffer(doc, dtype=np.uint8)
        n = len(arr)
        lines: dict[int, np.ndarray] = {}
        hits: dict[int, list[int]] = {}
        for pid, pattern in enumerate(self.patterns):
            width = len(pattern)
            if n < width:
                continue
            span = n - width + 1
            hit = np.ones(span, dtype=bool)
            for j, ch in enumerate(pattern):
                if self.decoded:
                    # 1-bit compare against the decoder line for this character
                    line = lines.get(ch)
                    if line is None:
                        line = lines[ch] = arr == ch
                    hit &= line[j:j + span]
                else:
                    hit &= arr[j:j + span] == ch
            for start in np.flatnonzero(hit).tolist():
                hits.setdefault(start + width - 1, []).append(pid)
        return hits

    def run(self, doc: bytes, doc_id: object = 0,
            probe: Callable[[int, tuple], None] | None = None) -> list[MatchEvent]:
        """Simulate ``doc``; ``probe(cycle, stack)`` observes the committed stack."""
        hits = self.comparator_outputs(doc)
        seg = bytearray(self.n_matchers)
        stack: list[str] = []
        reported: set[int] = set()
        events: list[MatchEvent] = []
        tag_filter = _TagFilter()
        heads, units, negs = self.heads, self.units, self.negs
        successors, cells = self.successors, self.cells
        max_depth = self.max_depth

        for cycle, b in enumerate(doc):
            tag = tag_filter.feed(b, cycle)
            if tag is not None:
                closing, code = tag
                if closing:
                    if not stack or stack[-1] != code:
                        raise MalformedDocument(f"close tag </{code}> does not match the open element", cycle)
                elif len(stack) >= max_depth:
                    raise StackOverflow(max_depth, cycle)
            pids = hits.get(cycle)
            if pids:
                if tag is None:
                    raise MalformedDocument("tag comparator fired outside a tag", cycle)
                depth = len(stack)
                tos = stack[-1] if stack else None
                fired: list[int] = []
                cleared: list[int] = []
                for p in pids:
                    for m, anchored in heads.get(p, ()):
                        if not anchored or depth == 0:
                            fired.append(m)
                    for m, expected in units.get(p, ()):
                        if seg[m] and (expected is None or expected == tos):
                            fired.append(m)
                    cleared.extend(negs.get(p, ()))
                for m in cleared:
                    seg[m] = 0
                firing_profiles = []
                for m in fired:
                    for s in successors[m]:
                        seg[s] = 1
                    firing_profiles.extend(cells[m])
                if firing_profiles:
                    events.extend(self._encode(firing_profiles, reported, doc_id, cycle))
            if tag is not None:
                if tag[0]:
                    stack.pop()
                else:
                    stack.append(tag[1])
            if probe is not None:
                probe(cycle, tuple(stack))

        if tag_filter.state != _TEXT:
            raise MalformedDocument("document ends inside a tag", len(doc))
        if stack:
            raise MalformedDocument(f"unclosed element <{stack[-1]}>", len(doc))
        if tag_filter.text_warnings:
            log.debug("doc %s: %d text bytes outside the gap classes", doc_id, tag_filter.text_warnings)
        return events

    def _encode(self, profiles: list[int], reported: set[int], doc_id, cycle: int) -> list[MatchEvent]:
        """Both priority encoders, in profile-id priority order; first firing only."""
        out = []
        for group in (Group.NO_STACK, Group.STACK):
            for pid in sorted(p for p in profiles if self.groups[p] is group):
                if pid not in reported:
                    reported.add(pid)
                    out.append(MatchEvent(doc_id, pid, cycle))
        out.sort(key=lambda e: e.profile_id)
        return out


def run(dp: Datapath, doc: bytes, doc_id: object = 0) -> list[MatchEvent]:
    return Engine(dp).run(doc, doc_id)


def run_stream(dp: Datapath, docs: Iterable) -> StreamResult:
    """Run every document in turn with a fresh engine state per document.

    ``docs`` holds either raw bytes (ids are positions) or ``(doc_id, bytes)``
    pairs. A failing document records its error and the stream continues.
    """
    engine = Engine(dp)
    events, errors = [], []
    total = 0
    t0 = time.perf_counter()
    for k, item in enumerate(docs):
        doc_id, doc = item if isinstance(item, tuple) else (k, item)
        total += len(doc)
        try:
            events.append(engine.run(doc, doc_id))
            errors.append(None)
        except XPathHwError as exc:
            events.append([])
            errors.append(exc)
    wall = time.perf_counter() - t0
    mbps = total / 1e6 / wall if wall > 0 else float("inf")
    return StreamResult(events, errors, ThroughputStats(total, wall, mbps))


CSV_HEADER = ("doc_id", "profile_id", "byte_offset")


def format_matches(events: Iterable[MatchEvent]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for e in events:
        writer.writerow((e.doc_id, e.profile_id, e.byte_offset))
    return buf.getvalue()


def parse_matches(text: str) -> list[tuple[str, int, int]]:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or tuple(rows[0]) != CSV_HEADER:
        raise ValueError("match file must start with the header doc_id,profile_id,byte_offset")
    return [(r[0], int(r[1]), int(r[2])) for r in rows[1:] if r]


def match_set(events: Sequence[MatchEvent]) -> set[tuple]:
    return {(e.doc_id, e.profile_id, e.byte_offset) for e in events}
