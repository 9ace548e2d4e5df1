"""Area/throughput grid over the four optimisation scenarios, plus trend checks."""

from __future__ import annotations

import csv
import io
from dataclasses import asdict, dataclass, fields
from fractions import Fraction
from typing import Iterable, Sequence

from .datapath import SCENARIOS, DatapathConfig, area_report, lower_to_datapath
from .dictionary import Dictionary
from .profile import parse_profiles
from .regex import build_prefix_forest, lower_profile
from .simulator import run_stream
from .workload import DEFAULT_SHARED_PREFIX_RATE, default_dictionary, gen_document, gen_profiles

RATIO_CELL = (1024, 6)
RATIO_THRESHOLD = 4


@dataclass(frozen=True)
class GridRow:
    count: int
    length: int
    config: str
    axis_mix: float
    shared_prefix_rate: float
    seed: int
    total_bits: int
    block_count: int
    match_count: int
    mb_per_s: float


@dataclass
class ExperimentTable:
    rows: list[GridRow]

    def cell(self, count: int, length: int) -> dict[str, GridRow]:
        return {r.config: r for r in self.rows if r.count == count and r.length == length}

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        names = [f.name for f in fields(GridRow)]
        writer.writerow(names)
        for row in self.rows:
            values = asdict(row)
            values["mb_per_s"] = f"{row.mb_per_s:.4f}"
            writer.writerow([values[n] for n in names])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "ExperimentTable":
        types = {f.name: f.type for f in fields(GridRow)}
        rows = []
        for rec in csv.DictReader(io.StringIO(text)):
            conv = {}
            for name, value in rec.items():
                t = types[name]
                conv[name] = int(value) if t == "int" else float(value) if t == "float" else value
            rows.append(GridRow(**conv))
        return cls(rows)


def _cell_seed(seed: int, count: int, length: int) -> int:
    return seed * 1_000_003 + count * 101 + length


def default_doc_set(dictionary: Dictionary, docs: int = 2, size: int = 4096, seed: int = 0) -> list[bytes]:
    return [gen_document(size, dictionary, seed=seed * 7919 + k) for k in range(docs)]


def run_grid(profile_counts: Sequence[int], lengths: Sequence[int],
             configs: Sequence[DatapathConfig] = SCENARIOS,
             doc_set: Sequence[bytes] | None = None, *,
             axis_mix: float = 0.5,
             shared_prefix_rate: float = DEFAULT_SHARED_PREFIX_RATE,
             seed: int = 0,
             dictionary: Dictionary | None = None) -> ExperimentTable:
    """One row per (count, length, config); rows sorted by those keys."""
    dictionary = dictionary or default_dictionary()
    docs = list(doc_set) if doc_set is not None else default_doc_set(dictionary, seed=seed)
    order = {cfg.name: k for k, cfg in enumerate(SCENARIOS)}
    rows = []
    for count in sorted(profile_counts):
        for length in sorted(lengths):
            cell_seed = _cell_seed(seed, count, length)
            raws, _ = gen_profiles(count, length, axis_mix, cell_seed, dictionary=dictionary,
                                   shared_prefix_rate=shared_prefix_rate)
            forest = build_prefix_forest(lower_profile(a) for a in parse_profiles(raws, dictionary))
            for cfg in sorted(configs, key=lambda c: order.get(c.name, len(order))):
                dp = lower_to_datapath(forest, cfg)
                report = area_report(dp)
                result = run_stream(dp, docs)
                for err in result.errors:
                    if err is not None:
                        raise err
                rows.append(GridRow(
                    count=count, length=length, config=cfg.name, axis_mix=axis_mix,
                    shared_prefix_rate=shared_prefix_rate, seed=cell_seed,
                    total_bits=report.total_bits, block_count=report.block_count,
                    match_count=sum(len(ev) for ev in result.events),
                    mb_per_s=result.stats.mb_per_s,
                ))
    return ExperimentTable(rows)


@dataclass(frozen=True)
class TrendResult:
    name: str
    passed: bool
    detail: str

    def __str__(self):
        return f"{'PASS' if self.passed else 'FAIL'} {self.name}: {self.detail}"


@dataclass
class TrendReport:
    results: list[TrendResult]

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def __str__(self):
        return "\n".join(str(r) for r in self.results) + "\n"


def _linearity(table: ExperimentTable) -> TrendResult:
    by_length: dict[tuple, list[GridRow]] = {}
    for row in table.rows:
        if row.config == "Unop":
            by_length.setdefault((row.length, row.axis_mix, row.shared_prefix_rate), []).append(row)
    if not by_length:
        return TrendResult("linearity", False, "no Unop rows")
    notes = []
    for (length, _, _), rows in sorted(by_length.items()):
        pts = sorted({(r.count, r.total_bits) for r in rows})
        if len({c for c, _ in pts}) != len(pts):
            return TrendResult("linearity", False, f"length {length}: conflicting rows for one count")
        if len(pts) < 2:
            notes.append(f"length {length}: single point")
            continue
        (x0, y0), (x1, y1) = pts[0], pts[1]
        slope = Fraction(y1 - y0, x1 - x0)
        for x, y in pts[2:]:
            if Fraction(y - y0) != slope * (x - x0):
                return TrendResult("linearity", False,
                                   f"length {length}: count {x} has {y} bits, line predicts {y0 + slope * (x - x0)}")
        notes.append(f"length {length}: {float(slope):g} bits/profile over {len(pts)} counts")
    return TrendResult("linearity", True, "; ".join(notes))


def _cells(table: ExperimentTable) -> list[tuple[int, int]]:
    return sorted({(r.count, r.length) for r in table.rows})


def _monotonicity(table: ExperimentTable) -> TrendResult:
    for count, length in _cells(table):
        cell = table.cell(count, length)
        missing = [c.name for c in SCENARIOS if c.name not in cell]
        if missing:
            return TrendResult("monotonicity", False, f"cell ({count},{length}) lacks {', '.join(missing)}")
        a = {name: row.total_bits for name, row in cell.items()}
        if not (a["Com-P-CharDec"] <= a["Unop-CharDec"] <= a["Unop"] and a["Com-P"] <= a["Unop"]):
            return TrendResult("monotonicity", False, f"cell ({count},{length}): {a}")
    return TrendResult("monotonicity", True, f"{len(_cells(table))} cells ordered")


def _match_agreement(table: ExperimentTable) -> TrendResult:
    for count, length in _cells(table):
        counts = {name: row.match_count for name, row in table.cell(count, length).items()}
        if len(set(counts.values())) > 1:
            return TrendResult("match agreement", False, f"cell ({count},{length}): {counts}")
    return TrendResult("match agreement", True, f"{len(_cells(table))} cells agree")


def _ratio(table: ExperimentTable) -> TrendResult | None:
    cell = table.cell(*RATIO_CELL)
    if "Unop" not in cell or "Com-P-CharDec" not in cell:
        return None
    ratio = cell["Unop"].total_bits / cell["Com-P-CharDec"].total_bits
    return TrendResult("area ratio", ratio >= RATIO_THRESHOLD,
                       f"Unop/Com-P-CharDec at {RATIO_CELL} = {ratio:.2f} (need >= {RATIO_THRESHOLD})")


def trend_check(table: ExperimentTable) -> TrendReport:
    results = [_linearity(table), _monotonicity(table), _match_agreement(table)]
    ratio = _ratio(table)
    if ratio is not None:
        results.append(ratio)
    return TrendReport(results)


def format_table(rows: Iterable[GridRow]) -> str:
    lines = [f"{'count':>6} {'len':>4} {'config':<14} {'bits':>9} {'blocks':>7} {'matches':>8} {'MB/s':>8}"]
    for r in rows:
        lines.append(f"{r.count:>6} {r.length:>4} {r.config:<14} {r.total_bits:>9} {r.block_count:>7} "
                     f"{r.match_count:>8} {r.mb_per_s:>8.3f}")
    return "\n".join(lines) + "\n"
