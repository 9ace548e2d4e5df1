"""Synthetic profiles and documents with explicit, reproducible knobs.

Both generators derive the same element schema from the dictionary: tag
``i`` (in dictionary order) may contain tags ``i+1 .. i+fanout``, and the
first ``roots`` tags may be document roots. Because child indices strictly
increase, no element can ever contain an element of its own tag.
"""

from __future__ import annotations

import json
import random
from dataclasses import asdict, dataclass
from fractions import Fraction
from pathlib import Path

from .dictionary import Dictionary, build_dictionary, close_tag, open_tag

DEFAULT_TAGS = 64
DEFAULT_FANOUT = 2
DEFAULT_ROOTS = 2
DEFAULT_SHARED_PREFIX_RATE = 0.6
DEFAULT_NOISE = 0.05
_TEXT_ALPHABET = "abcdefghijklmnopqrstuvwxyz"
_MIN_DOC = 9  # <xy></xy>


def default_dictionary(n_tags: int = DEFAULT_TAGS) -> Dictionary:
    return build_dictionary(f"t{i:03d}" for i in range(n_tags))


@dataclass(frozen=True)
class Schema:
    names: tuple[str, ...]
    fanout: int = DEFAULT_FANOUT
    roots: int = DEFAULT_ROOTS

    @classmethod
    def from_dictionary(cls, dictionary: Dictionary, fanout: int = DEFAULT_FANOUT,
                        roots: int = DEFAULT_ROOTS) -> "Schema":
        if len(dictionary) == 0:
            raise ValueError("dictionary is empty")
        return cls(tuple(dictionary), fanout, min(roots, len(dictionary)))

    def children(self, i: int, recursive: bool = False) -> range:
        lo = i if recursive else i + 1
        return range(lo, min(i + 1 + self.fanout, len(self.names)))


def _child_quota(count: int, steps: int, axis_mix: Fraction) -> list[int]:
    """Child axes per profile, spread so every prefix of the set is on target.

    Cumulative child steps after ``j`` profiles is ``round(axis_mix * steps * j)``,
    so the total for a set depends only on its size.
    """
    def cum(j: int) -> int:
        x = axis_mix * steps * j
        return int(x + Fraction(1, 2))

    return [cum(j + 1) - cum(j) for j in range(count)]


@dataclass
class _Path:
    floating: bool
    tags: list[int]
    child: list[bool]  # axis of steps 2..k

    def render(self, names) -> str:
        text = ("//" if self.floating else "") + names[self.tags[0]]
        for tag, is_child in zip(self.tags[1:], self.child):
            text += ("/" if is_child else "//") + names[tag]
        return text


def gen_profiles(count: int, length: int, axis_mix: float, seed: int, *,
                 dictionary: Dictionary | None = None,
                 shared_prefix_rate: float = DEFAULT_SHARED_PREFIX_RATE,
                 floating_rate: float = 0.0,
                 noise: float = DEFAULT_NOISE,
                 fanout: int = DEFAULT_FANOUT,
                 roots: int = DEFAULT_ROOTS) -> tuple[list[str], Dictionary]:
    """Generate ``count`` linear profiles of ``length`` tags.

    ``axis_mix`` is the fraction of non-first steps that use ``/``;
    ``shared_prefix_rate`` is the chance that a profile reuses a prefix of an
    earlier one. At rate 0 no two profiles share a first tag while unused
    tags remain. ``noise`` is the chance a step ignores the schema.
    """
    if count < 1 or length < 1:
        raise ValueError("count and length must be at least 1")
    for label, value in (("axis_mix", axis_mix), ("shared_prefix_rate", shared_prefix_rate),
                         ("floating_rate", floating_rate), ("noise", noise)):
        if not 0 <= value <= 1:
            raise ValueError(f"{label} must lie in [0, 1]")
    dictionary = dictionary or default_dictionary()
    schema = Schema.from_dictionary(dictionary, fanout, roots)
    n = len(schema.names)
    rng = random.Random(seed)
    quota = _child_quota(count, length - 1, Fraction(axis_mix).limit_denominator(10**6))
    paths: list[_Path] = []
    used_first: set[tuple[bool, int]] = set()

    def fresh_first(floating: bool) -> tuple[bool, int]:
        # an unused root tag, else an unused floating start, else share a root
        candidates = [] if floating else [(False, range(schema.roots))]
        candidates += [(True, range(n // 2)), (True, range(n))]
        for as_floating, pool in candidates:
            free = [t for t in pool if (as_floating, t) not in used_first]
            if free:
                return as_floating, rng.choice(free)
        return False, rng.randrange(schema.roots)

    def extend(prev: int, is_child: bool) -> int:
        if rng.random() < noise:
            return rng.randrange(n)
        node = prev
        for _ in range(1 if is_child else rng.choice((1, 1, 2))):
            kids = schema.children(node)
            if not kids:
                return rng.randrange(n)
            node = rng.choice(kids)
        return node

    for j in range(count):
        q = quota[j]
        if paths and rng.random() < shared_prefix_rate:
            base = rng.choice(paths)
            options = []
            for k in range(1, length + 1):
                have = sum(base.child[:k - 1])
                if have <= q <= have + (length - k):
                    options.append(k)
            k = rng.choice(options)
            path = _Path(base.floating, base.tags[:k], base.child[:k - 1])
        else:
            floating, first = fresh_first(rng.random() < floating_rate)
            path = _Path(floating, [first], [])
        used_first.add((path.floating, path.tags[0]))
        remaining = length - len(path.tags)
        need = q - sum(path.child)
        child_slots = set(rng.sample(range(remaining), need))
        for s in range(remaining):
            is_child = s in child_slots
            path.tags.append(extend(path.tags[-1], is_child))
            path.child.append(is_child)
        paths.append(path)
    return [p.render(schema.names) for p in paths], dictionary


def gen_document(size_bytes: int, dictionary: Dictionary, max_depth: int = 10, seed: int = 0, *,
                 recursive: bool = False, fanout: int = DEFAULT_FANOUT, roots: int = DEFAULT_ROOTS,
                 open_prob: float = 0.6, text_prob: float = 0.25) -> bytes:
    """Encoded document of exactly ``size_bytes`` bytes with one root element."""
    if size_bytes < _MIN_DOC:
        raise ValueError(f"size_bytes must be at least {_MIN_DOC}")
    if max_depth < 1:
        raise ValueError("max_depth must be at least 1")
    schema = Schema.from_dictionary(dictionary, fanout, roots)
    codes = [dictionary.code(name) for name in schema.names]
    rng = random.Random(seed)
    out = bytearray()
    root = rng.randrange(schema.roots)
    stack = [root]
    out += open_tag(codes[root])

    def text(limit: int) -> None:
        words = []
        size = 0
        for _ in range(rng.randint(1, 2)):
            w = "".join(rng.choices(_TEXT_ALPHABET, k=rng.randint(2, 6)))
            if size + len(w) + 1 > limit:
                break
            words.append(w)
            size += len(w) + 1
        if words:
            out.extend((" ".join(words) + " ").encode("ascii"))

    while True:
        budget = size_bytes - len(out) - 5 * len(stack)
        if budget < 24:
            break
        top = stack[-1]
        if rng.random() < text_prob:
            text(budget - 18)
        kids = schema.children(top, recursive)
        if kids and len(stack) < max_depth and (len(stack) == 1 or rng.random() < open_prob):
            child = rng.choice(kids)
            out += open_tag(codes[child])
            stack.append(child)
        elif len(stack) > 1:
            out += close_tag(codes[stack.pop()])
        elif not kids or max_depth == 1:
            break
    while len(stack) > 1:
        out += close_tag(codes[stack.pop()])
    pad = size_bytes - len(out) - 5
    while pad > 0:
        chunk = min(pad, rng.randint(4, 12))
        word = "".join(rng.choices(_TEXT_ALPHABET, k=chunk - 1)) + " " if chunk > 1 else " "
        out += word.encode("ascii")
        pad -= chunk
    out += close_tag(codes[root])
    return bytes(out)


@dataclass
class WorkloadParams:
    count: int = 16
    length: int = 2
    axis_mix: float = 0.5
    shared_prefix_rate: float = DEFAULT_SHARED_PREFIX_RATE
    floating_rate: float = 0.0
    noise: float = DEFAULT_NOISE
    n_tags: int = DEFAULT_TAGS
    fanout: int = DEFAULT_FANOUT
    roots: int = DEFAULT_ROOTS
    docs: int = 4
    doc_size: int = 4096
    max_depth: int = 10
    seed: int = 1


def write_workload(out_dir: str | Path, params: WorkloadParams) -> dict:
    """Write profiles.txt, dictionary.tsv, docs/*.xml and manifest.json."""
    out = Path(out_dir)
    (out / "docs").mkdir(parents=True, exist_ok=True)
    dictionary = default_dictionary(params.n_tags)
    profiles, _ = gen_profiles(
        params.count, params.length, params.axis_mix, params.seed,
        dictionary=dictionary, shared_prefix_rate=params.shared_prefix_rate,
        floating_rate=params.floating_rate, noise=params.noise,
        fanout=params.fanout, roots=params.roots,
    )
    (out / "profiles.txt").write_text("".join(p + "\n" for p in profiles), encoding="utf-8")
    dictionary.save(out / "dictionary.tsv")
    doc_files = []
    for k in range(params.docs):
        doc_seed = params.seed * 1_000_003 + k
        doc = gen_document(params.doc_size, dictionary, params.max_depth, doc_seed,
                           fanout=params.fanout, roots=params.roots)
        path = out / "docs" / f"doc_{k:04d}.xml"
        path.write_bytes(doc)
        doc_files.append({"file": str(path.relative_to(out)), "seed": doc_seed, "bytes": len(doc)})
    manifest = {
        "params": asdict(params),
        "documents": doc_files,
        "note": "schema, selectivity and rates are this generator's own defaults, "
                "not a reconstruction of any original corpus",
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return manifest
