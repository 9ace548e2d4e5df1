from dataclasses import replace

import pytest

from xpathhw.datapath import SCENARIOS
from xpathhw.metrics import ExperimentTable, GridRow, format_table, run_grid, trend_check
from xpathhw.workload import default_dictionary, gen_document

DICT = default_dictionary()
DOCS = [gen_document(2000, DICT, seed=s) for s in range(2)]


@pytest.fixture(scope="module")
def small_grid():
    return run_grid([16, 64], [2], doc_set=DOCS, dictionary=DICT)


def test_grid_cardinality(small_grid):
    assert len(small_grid.rows) == 8
    assert [r.config for r in small_grid.rows[:4]] == [c.name for c in SCENARIOS]


def test_grid_passes_trends(small_grid):
    report = trend_check(small_grid)
    assert report.passed, str(report)


def test_csv_round_trip(small_grid):
    text = small_grid.to_csv()
    back = ExperimentTable.from_csv(text)
    assert [replace(r, mb_per_s=0.0) for r in back.rows] == [replace(r, mb_per_s=0.0) for r in small_grid.rows]
    assert back.to_csv() == text


def test_area_grows_with_count():
    table = run_grid([16, 1024], [6], configs=SCENARIOS[:1], doc_set=DOCS[:1], dictionary=DICT)
    small, big = (table.cell(c, 6)["Unop"].total_bits for c in (16, 1024))
    assert big > small


def test_ratio_at_largest_cell():
    table = run_grid([1024], [6], doc_set=DOCS[:1], dictionary=DICT, shared_prefix_rate=0.9)
    cell = table.cell(1024, 6)
    assert cell["Unop"].total_bits / cell["Com-P-CharDec"].total_bits >= 4


def test_rate_zero_means_no_sharing():
    table = run_grid([16, 64], [2, 4], doc_set=DOCS[:1], dictionary=DICT, shared_prefix_rate=0.0)
    for count, length in [(16, 2), (16, 4), (64, 2), (64, 4)]:
        cell = table.cell(count, length)
        assert cell["Com-P"].total_bits == cell["Unop"].total_bits
        assert cell["Com-P-CharDec"].total_bits == cell["Unop-CharDec"].total_bits


def row(count, config, bits, matches=0):
    return GridRow(count, 2, config, 0.5, 0.6, 0, bits, 1, matches, 1.0)


def synthetic(unop_bits):
    rows = []
    for count, u in zip((16, 32, 64), unop_bits):
        rows += [row(count, "Unop", u), row(count, "Com-P", u - 10),
                 row(count, "Unop-CharDec", u - 20), row(count, "Com-P-CharDec", u - 30)]
    return ExperimentTable(rows)


def test_synthetic_table_passes():
    assert trend_check(synthetic([160, 320, 640])).passed


def test_injected_nonlinearity():
    report = trend_check(synthetic([160, 320, 641]))
    (bad,) = [r for r in report.results if not r.passed]
    assert bad.name == "linearity"
    assert "count 64" in bad.detail


def test_injected_order_violation():
    table = synthetic([160, 320, 640])
    table.rows[5] = row(32, "Com-P", 400)
    report = trend_check(table)
    (bad,) = [r for r in report.results if not r.passed]
    assert bad.name == "monotonicity"
    assert "(32,2)" in bad.detail


def test_injected_match_disagreement():
    table = synthetic([160, 320, 640])
    table.rows[0] = row(16, "Unop", 160, matches=3)
    assert not trend_check(table).passed


def test_format_table(small_grid):
    text = format_table(small_grid.rows)
    assert len(text.splitlines()) == 9
