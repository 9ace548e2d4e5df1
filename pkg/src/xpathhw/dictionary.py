"""Fixed-length tag encoding.

Every element name is rewritten to a two-symbol code (a letter followed by a
digit), so an encoded open tag ``<a1>`` is always 4 bytes and a close tag
``</a1>`` always 5 bytes. Codes are handed out in the order
``a0, a1, ..., a9, b0, ..., z9``.
"""

from __future__ import annotations

import re
import string
from pathlib import Path
from types import MappingProxyType
from typing import Iterable, Mapping

from .errors import (
    CapacityExceeded,
    DuplicateTag,
    MalformedDocument,
    UnknownTag,
    UnsupportedConstruct,
)

LETTERS = string.ascii_lowercase
DIGITS = string.digits
CODE_SPACE = len(LETTERS) * len(DIGITS)

OPEN_TAG_BYTES = 4
CLOSE_TAG_BYTES = 5

_CODE_RE = re.compile(r"[a-z][0-9]")


def code_at(index: int) -> str:
    """Return the code at position ``index`` of the allocation sequence."""
    if not 0 <= index < CODE_SPACE:
        raise IndexError(index)
    return LETTERS[index // len(DIGITS)] + DIGITS[index % len(DIGITS)]


def code_index(code: str) -> int:
    if not is_code(code):
        raise ValueError(f"{code!r} is not a two-symbol tag code")
    return LETTERS.index(code[0]) * len(DIGITS) + DIGITS.index(code[1])


def is_code(text: str) -> bool:
    return bool(_CODE_RE.fullmatch(text))


def open_tag(code: str) -> bytes:
    return b"<" + code.encode("ascii") + b">"


def close_tag(code: str) -> bytes:
    return b"</" + code.encode("ascii") + b">"


class Dictionary:
    """Immutable, injective map from tag names to two-symbol codes."""

    __slots__ = ("_codes", "_names", "cursor")

    def __init__(self, entries: Iterable[tuple[str, str]] = (), cursor: int | None = None):
        codes: dict[str, str] = {}
        names: dict[str, str] = {}
        for name, code in entries:
            if not name:
                raise ValueError("tag names must be nonempty")
            if name in codes:
                raise DuplicateTag(name)
            if not is_code(code):
                raise ValueError(f"{code!r} is not a two-symbol tag code")
            if code in names:
                raise ValueError(f"code {code!r} assigned to both {names[code]!r} and {name!r}")
            codes[name] = code
            names[code] = name
        self._codes = codes
        self._names = names
        if cursor is None:
            cursor = max((code_index(c) for c in names), default=-1) + 1
        self.cursor = cursor

    @classmethod
    def identity(cls, codes: Iterable[str]) -> "Dictionary":
        """A dictionary for profiles and documents that are already encoded."""
        return cls((c, c) for c in dict.fromkeys(codes))

    @property
    def entries(self) -> Mapping[str, str]:
        return MappingProxyType(self._codes)

    def __len__(self) -> int:
        return len(self._codes)

    def __contains__(self, name: object) -> bool:
        return name in self._codes

    def __iter__(self):
        return iter(self._codes)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Dictionary):
            return NotImplemented
        return list(self._codes.items()) == list(other._codes.items())

    def __repr__(self) -> str:
        return f"Dictionary({list(self._codes.items())!r})"

    @property
    def allocation_cursor(self) -> str | None:
        """Next unassigned code, or None when the code space is used up."""
        return code_at(self.cursor) if self.cursor < CODE_SPACE else None

    def code(self, name: str, offset: int | None = None) -> str:
        try:
            return self._codes[name]
        except KeyError:
            raise UnknownTag(name, offset) from None

    def name(self, code: str) -> str:
        try:
            return self._names[code]
        except KeyError:
            raise UnknownTag(code) from None

    def codes(self) -> list[str]:
        return list(self._codes.values())

    def to_tsv(self) -> str:
        return "".join(f"{name}\t{code}\n" for name, code in self._codes.items())

    @classmethod
    def from_tsv(cls, text: str) -> "Dictionary":
        entries = []
        for lineno, line in enumerate(text.splitlines(), 1):
            if not line.strip():
                continue
            try:
                name, code = line.split("\t")
            except ValueError:
                raise ValueError(f"dictionary line {lineno}: expected 'name<TAB>code'") from None
            entries.append((name, code))
        return cls(entries)

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.to_tsv(), encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "Dictionary":
        return cls.from_tsv(Path(path).read_text(encoding="utf-8"))


def build_dictionary(tag_names: Iterable[str], start: str = "a0") -> Dictionary:
    """Assign codes to ``tag_names`` in encounter order, beginning at ``start``."""
    names = list(tag_names)
    seen: set[str] = set()
    for name in names:
        if name in seen:
            raise DuplicateTag(name)
        seen.add(name)
    first = code_index(start)
    capacity = CODE_SPACE - first
    if len(names) > capacity:
        raise CapacityExceeded(len(names), capacity)
    entries = [(name, code_at(first + i)) for i, name in enumerate(names)]
    return Dictionary(entries, cursor=first + len(names))


# Element tags: optional '/', a name, optional whitespace, optional '/', '>'.
_TAG_RE = re.compile(rb"<(/?)([^\s/<>=!?\"']+)\s*(/?)>")
_ATTR_RE = re.compile(rb"<[^\s/<>]+\s+[^\s/>]")
_ENCODED_TAG_RE = re.compile(rb"<(/?)([a-z][0-9])>")


def _reject(doc: bytes, pos: int) -> None:
    rest = doc[pos:pos + 9]
    if rest.startswith(b"<!--"):
        raise UnsupportedConstruct("comment", pos)
    if rest.startswith(b"<![CDATA["):
        raise UnsupportedConstruct("CDATA section", pos)
    if rest.startswith(b"<!"):
        raise UnsupportedConstruct("DTD declaration", pos)
    if rest.startswith(b"<?"):
        raise UnsupportedConstruct("processing instruction", pos)
    if _ATTR_RE.match(doc, pos):
        raise UnsupportedConstruct("attribute", pos)
    raise MalformedDocument("unparseable tag", pos)


def scan_tags(doc: bytes) -> Iterable[tuple[int, int, bool, str, bool]]:
    """Yield ``(start, end, closing, name, self_closing)`` for each element tag."""
    pos = doc.find(b"<")
    while pos != -1:
        m = _TAG_RE.match(doc, pos)
        if m is None:
            _reject(doc, pos)
        closing, raw_name, slash = m.group(1), m.group(2), m.group(3)
        if closing and slash:
            raise MalformedDocument("close tag cannot be self-closing", pos)
        try:
            name = raw_name.decode("utf-8")
        except UnicodeDecodeError:
            raise MalformedDocument("tag name is not UTF-8", pos) from None
        if ":" in name:
            raise UnsupportedConstruct("namespace prefix", pos)
        yield pos, m.end(), bool(closing), name, bool(slash)
        pos = doc.find(b"<", m.end())


def encode_document(doc: bytes, dictionary: Dictionary) -> bytes:
    """Rewrite every element tag in ``doc`` to its two-symbol code.

    Text is copied unchanged. A self-closing ``<x/>`` becomes ``<xy></xy>``
    so that the encoded stream only ever contains 4- and 5-byte tags.
    """
    out = bytearray()
    last = 0
    for start, end, closing, name, self_closing in scan_tags(doc):
        out += doc[last:start]
        code = dictionary.code(name, start)
        if closing:
            out += close_tag(code)
        else:
            out += open_tag(code)
            if self_closing:
                out += close_tag(code)
        last = end
    out += doc[last:]
    return bytes(out)


def decode_document(doc: bytes, dictionary: Dictionary) -> bytes:
    """Inverse of :func:`encode_document` for documents without ``<x/>`` tags."""

    def restore(m: re.Match) -> bytes:
        name = dictionary.name(m.group(2).decode("ascii"))
        return b"<" + m.group(1) + name.encode("utf-8") + b">"

    return _ENCODED_TAG_RE.sub(restore, doc)
