"""Exception hierarchy shared by every pipeline stage."""

from __future__ import annotations


class XPathHwError(Exception):
    """Base class; the CLI maps each subclass to a one-line diagnostic."""

    kind = "error"


class DuplicateTag(XPathHwError):
    kind = "duplicate tag"

    def __init__(self, name: str):
        super().__init__(f"tag name {name!r} listed more than once")
        self.name = name


class CapacityExceeded(XPathHwError):
    kind = "capacity exceeded"

    def __init__(self, requested: int, capacity: int):
        super().__init__(f"{requested} tag names but only {capacity} two-symbol codes available")
        self.requested = requested
        self.capacity = capacity


class UnknownTag(XPathHwError):
    kind = "unknown tag"

    def __init__(self, name: str, offset: int | None = None):
        where = f" at byte {offset}" if offset is not None else ""
        super().__init__(f"tag {name!r} is not in the dictionary{where}")
        self.name = name
        self.offset = offset


class UnsupportedConstruct(XPathHwError):
    """Document markup the encoder refuses (attributes, PIs, CDATA, ...)."""

    kind = "unsupported markup"

    def __init__(self, what: str, offset: int):
        super().__init__(f"{what} at byte {offset} is not supported")
        self.what = what
        self.offset = offset


class ProfileSyntaxError(XPathHwError):
    kind = "parse error"

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (column {position})")
        self.position = position


class UnsupportedFeature(XPathHwError):
    kind = "parse error"

    def __init__(self, feature: str, position: int):
        super().__init__(f"unsupported XPath feature: {feature} (column {position})")
        self.feature = feature
        self.position = position


class EmptyForest(XPathHwError):
    kind = "empty profile set"

    def __init__(self) -> None:
        super().__init__("cannot build a datapath without profiles")


class MalformedDocument(XPathHwError):
    kind = "malformed doc"

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at byte {offset}")
        self.offset = offset


class StackOverflow(XPathHwError):
    kind = "stack overflow"

    def __init__(self, depth: int, offset: int):
        super().__init__(f"nesting depth would exceed {depth} at byte {offset}")
        self.depth = depth
        self.offset = offset
