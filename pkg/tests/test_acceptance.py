"""End-to-end acceptance checks, one test per criterion."""

import random
import re

from conftest import compile_profiles
from xpathhw.cli import main
from xpathhw.datapath import SCENARIOS, area_report, comparator_bits, lower_to_datapath
from xpathhw.dictionary import open_tag
from xpathhw.metrics import RATIO_CELL, run_grid, trend_check
from xpathhw.oracle import match_document
from xpathhw.profile import parse_profile, parse_profiles
from xpathhw.regex import build_prefix_forest, expand_forest, lower_profile
from xpathhw.simulator import Engine, match_set
from xpathhw.workload import default_dictionary, gen_document, gen_profiles

DICT = default_dictionary()
COUNTS = [16, 32, 64, 128, 256, 512, 1024]
LENGTHS = [2, 4, 6]
MIXES = [0.0, 0.5, 1.0]
DOCS_PER_SET = 16


def _equivalence_sweep():
    """Yield (label, oracle set, per-config sets) for every document/profile-set pair."""
    rng = random.Random(2024)
    for length in LENGTHS:
        for mix in MIXES:
            for count in COUNTS:
                seed = rng.randrange(2**31)
                raws, _ = gen_profiles(count, length, mix, seed, dictionary=DICT)
                asts = parse_profiles(raws, DICT)
                forest = build_prefix_forest(lower_profile(a) for a in asts)
                engines = [Engine(lower_to_datapath(forest, cfg)) for cfg in SCENARIOS]
                for k in range(DOCS_PER_SET):
                    doc = gen_document(rng.randint(600, 3000), DICT, seed=seed + k)
                    expected = match_set(match_document(doc, asts))
                    got = [match_set(e.run(doc)) for e in engines]
                    yield (length, mix, count, k), expected, got


_SWEEP = None


def sweep():
    global _SWEEP
    if _SWEEP is None:
        _SWEEP = list(_equivalence_sweep())
    return _SWEEP


def test_criterion_1_oracle_equivalence(verdict):
    pairs = sweep()
    bad = [(label, len(got[0] - exp), len(exp - got[0])) for label, exp, got in pairs if got[0] != exp]
    matches = sum(len(exp) for _, exp, _ in pairs)
    detail = f"{len(pairs)} pairs, {matches} oracle matches, {len(bad)} mismatching pairs"
    if bad:
        label, fp, fn = bad[0]
        detail += f"; first at (length, mix, count, doc)={label}: {fp} false positives, {fn} false negatives"
    verdict(1, "oracle equivalence", len(pairs) >= 1000 and not bad, detail)


def test_criterion_2_configuration_invariance(verdict):
    pairs = sweep()
    bad = [label for label, _, got in pairs if any(g != got[0] for g in got[1:])]
    verdict(2, "configuration invariance", not bad,
            f"{len(pairs)} workloads x {len(SCENARIOS)} configurations, {len(bad)} disagreements")


def test_criterion_3_translation_fidelity(verdict):
    got = {raw: lower_profile(parse_profile(raw)).dump() for raw in ("a0//b0", "a0/b0")}
    want = {
        "a0//b0": "P0: OPEN(a0) GAP NEG(/a0) OPEN(b0)",
        "a0/b0": "P0: OPEN(a0) GAP NEG(/a0) TOS(a0) OPEN(b0)",
    }
    verdict(3, "translation fidelity", got == want, f"{got}")


def test_criterion_4_matcher_area(verdict):
    pattern = open_tag("a0")
    plain, decoded = comparator_bits(pattern, False), comparator_bits(pattern, True)
    reports = [area_report(compile_profiles(["a0"], cfg)).per_kind["tag_matcher"] for cfg in (SCENARIOS[0], SCENARIOS[2])]
    ok = (plain, decoded) == (32, 4) and reports == [32, 4]
    verdict(4, "per-matcher area", ok, f"undecoded {plain} bits, decoded {decoded} bits, reports {reports}")


def test_criterion_5_area_trends(verdict):
    docs = [gen_document(3000, DICT, seed=s) for s in range(2)]
    table = run_grid([16, 64, 256, 1024], LENGTHS, doc_set=docs, dictionary=DICT)
    report = trend_check(table)
    names = [r.name for r in report.results]
    ok = report.passed and names == ["linearity", "monotonicity", "match agreement", "area ratio"]
    cell = table.cell(*RATIO_CELL)
    ratio = cell["Unop"].total_bits / cell["Com-P-CharDec"].total_bits
    verdict(5, "area trends", ok, f"ratio {ratio:.2f} at {RATIO_CELL}; " + " | ".join(str(r) for r in report.results))


def _random_multiset(rng: random.Random):
    tags = ["a0", "b0", "c0", "d0"][:rng.randint(1, 4)]
    raws = []
    for _ in range(rng.randint(1, 12)):
        if raws and rng.random() < 0.3:
            base = rng.choice(raws)
            cuts = [m.start() for m in re.finditer(r"(?<=\d)/", base)]
            raws.append(base[:rng.choice(cuts)] if cuts and rng.random() < 0.7 else base)
            continue
        raw = rng.choice(["", "//"]) + rng.choice(tags)
        for _ in range(rng.randint(0, 4)):
            raw += rng.choice(["/", "//"]) + rng.choice(tags)
        raws.append(raw)
    return raws


def test_criterion_6_forest_round_trip(verdict):
    rng = random.Random(6)
    failures = strict_prefix_sets = 0
    for _ in range(10_000):
        raws = _random_multiset(rng)
        if any(a != b and b.startswith(a) and b[len(a)] == "/" for a in raws for b in raws):
            strict_prefix_sets += 1
        irs = [lower_profile(parse_profile(r, profile_id=k)) for k, r in enumerate(raws)]
        if expand_forest(build_prefix_forest(irs)) != irs:
            failures += 1
    verdict(6, "prefix-forest round trip", failures == 0 and strict_prefix_sets > 0,
            f"10000 multisets ({strict_prefix_sets} with strict prefixes), {failures} failures")


_TAG = re.compile(rb"<(/?)([a-z][0-9])>")


def _open_paths(doc: bytes) -> list[tuple]:
    changes = {m.end() - 1: (m.group(1), m.group(2).decode()) for m in _TAG.finditer(doc)}
    path, out = [], []
    for i in range(len(doc)):
        if i in changes:
            closing, code = changes[i]
            path.pop() if closing else path.append(code)
        out.append(tuple(path))
    return out


def test_criterion_7_stack_law(verdict):
    raws, _ = gen_profiles(32, 4, 1.0, 7, dictionary=DICT)
    engine = Engine(compile_profiles(raws, SCENARIOS[3], DICT))
    bad = cycles = depth = 0
    for k in range(100):
        doc = gen_document(2000 + 37 * k, DICT, seed=700 + k)
        seen = []
        engine.run(doc, probe=lambda cycle, stack: seen.append(stack))
        cycles += len(seen)
        bad += seen != _open_paths(doc)
        depth = max(depth, max(len(path) for path in seen))
    verdict(7, "stack law", bad == 0 and depth > 3,
            f"100 documents, {cycles} cycles probed, max depth {depth}, {bad} documents diverged")


def test_criterion_8_determinism(verdict, tmp_path, capsys):
    wl = tmp_path / "wl"
    assert main(["gen", "--out", str(wl), "--count", "64", "--length", "4", "--docs", "3", "--seed", "8"]) == 0
    docs = sorted(str(p) for p in (wl / "docs").iterdir())
    common = ["--profiles", str(wl / "profiles.txt"), "--dict", str(wl / "dictionary.tsv"), "--prefix-share"]
    outputs = []
    for run_no in range(2):
        out = tmp_path / f"c{run_no}"
        assert main(["compile", *common, "--char-decode", "--out", str(out)]) == 0
        assert main(["run", *common, "--char-decode", "--out", str(out / "matches.csv"), *docs]) == 0
        outputs.append({p.name: p.read_bytes() for p in sorted(out.iterdir())})
    capsys.readouterr()
    same = outputs[0] == outputs[1]
    verdict(8, "determinism", same and len(outputs[0]) == 5,
            f"{sorted(outputs[0])} byte-identical across two runs: {same}")
