"""Parser for the linear XPath dialect: tags joined by ``/`` and ``//``."""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from pathlib import Path

from .dictionary import Dictionary, is_code
from .errors import ProfileSyntaxError, UnknownTag, UnsupportedFeature


class Axis(enum.Enum):
    CHILD = "/"
    DESCENDANT = "//"


@dataclass(frozen=True)
class LocationStep:
    axis: Axis
    tag: str

    def __post_init__(self):
        if not is_code(self.tag):
            raise ValueError(f"{self.tag!r} is not a two-symbol tag code")


@dataclass(frozen=True)
class ProfileAst:
    profile_id: int
    steps: tuple[LocationStep, ...]

    def __post_init__(self):
        if not self.steps:
            raise ValueError("a profile needs at least one step")
        if self.profile_id < 0:
            raise ValueError("profile_id must be nonnegative")

    @property
    def rooted(self) -> bool:
        """True when the first tag must be a document root element."""
        return self.steps[0].axis is Axis.CHILD


_NAME_RE = re.compile(r"[\w.\-]+")

# character -> feature name, for constructs outside the dialect
_UNSUPPORTED = {
    "[": "predicate",
    "]": "predicate",
    "*": "wildcard",
    "@": "attribute",
    "(": "function call",
    ")": "function call",
    "|": "union",
    ":": "namespace or explicit axis",
    "$": "variable",
    "=": "comparison",
}


def parse_profile(raw: str, dictionary: Dictionary | None = None, profile_id: int = 0) -> ProfileAst:
    """Parse ``raw`` into a :class:`ProfileAst`, translating tag names.

    With ``dictionary=None`` the names must already be two-symbol codes.
    A leading ``//`` makes the first step a descendant step (it may match at
    any depth); a leading ``/`` or no separator anchors it at the root.
    """
    text = raw.strip()
    offset = len(raw) - len(raw.lstrip())
    if not text:
        raise ProfileSyntaxError("empty profile", offset)
    steps = []
    i = 0
    n = len(text)
    while i < n:
        if text.startswith("//", i):
            axis = Axis.DESCENDANT
            i += 2
        elif text[i] == "/":
            axis = Axis.CHILD
            i += 1
        elif not steps:
            axis = Axis.CHILD
        else:
            raise ProfileSyntaxError("expected '/' or '//'", offset + i)
        start = i
        while i < n and text[i] != "/":
            ch = text[i]
            if ch in _UNSUPPORTED:
                raise UnsupportedFeature(_UNSUPPORTED[ch], offset + i)
            i += 1
        name = text[start:i]
        if not name:
            raise ProfileSyntaxError("expected a tag name", offset + start)
        if name in (".", ".."):
            raise UnsupportedFeature("self/parent step", offset + start)
        if not _NAME_RE.fullmatch(name):
            bad = next(k for k, ch in enumerate(name) if not _NAME_RE.fullmatch(ch))
            raise ProfileSyntaxError(f"invalid character {name[bad]!r} in tag name", offset + start + bad)
        if dictionary is None:
            if not is_code(name):
                raise UnknownTag(name)
            code = name
        else:
            code = dictionary.code(name)
        steps.append(LocationStep(axis, code))
    return ProfileAst(profile_id, tuple(steps))


def unparse_profile(ast: ProfileAst) -> str:
    """Render the AST back in encoded form; the root anchor is left implicit."""
    parts = []
    for k, step in enumerate(ast.steps):
        if k == 0:
            parts.append("//" if step.axis is Axis.DESCENDANT else "")
        else:
            parts.append(step.axis.value)
        parts.append(step.tag)
    return "".join(parts)


def read_profile_lines(path: str | Path) -> list[str]:
    """Nonblank lines of a profile file; their order gives the profile ids."""
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    return [line.strip() for line in lines if line.strip()]


def parse_profiles(raws: list[str], dictionary: Dictionary | None = None) -> list[ProfileAst]:
    return [parse_profile(raw, dictionary, pid) for pid, raw in enumerate(raws)]
