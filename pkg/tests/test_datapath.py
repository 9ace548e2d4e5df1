import json
from pathlib import Path

import pytest
from hypothesis import given, settings, strategies as st

from conftest import compile_profiles
from xpathhw.datapath import (
    DECODER_AREA,
    SCENARIOS,
    STREAM,
    DatapathConfig,
    Group,
    Kind,
    area_report,
    comparator_bits,
    lower_to_datapath,
)
from xpathhw.errors import EmptyForest
from xpathhw.netlist import emit_netlist
from xpathhw.regex import PrefixForest

GOLDEN = Path(__file__).parent / "golden"
UNOP, COMP, UNOP_CD, COMP_CD = SCENARIOS


def kinds(dp):
    return [b.describe() for b in dp.blocks]


def test_descendant_blocks():
    dp = compile_profiles(["a0//b0"])
    assert kinds(dp) == [
        "tag_matcher(<a0>)", "negation_block(</a0>)", "tag_matcher(<b0>)",
        "result_cell(P0)", "priority_encoder(nostack)", "priority_encoder(stack)",
    ]
    area = {b.describe(): b.area_bits for b in dp.blocks}
    assert area["tag_matcher(<a0>)"] == 32
    assert area["tag_matcher(<b0>)"] == 32
    assert area["negation_block(</a0>)"] == 40
    cell = dp.of_kind(Kind.RESULT_CELL)[0]
    assert cell.group is Group.NO_STACK
    enc = {b.group: b for b in dp.of_kind(Kind.PRIORITY_ENCODER)}
    assert enc[Group.NO_STACK].inputs == (cell.block_id,)
    assert enc[Group.STACK].inputs == ()
    dp.validate()


def test_child_blocks():
    dp = compile_profiles(["a0/b0"])
    assert kinds(dp) == [
        "tag_filter", "stack_block(depth=64)", "tag_matcher(<a0>)", "negation_block(</a0>)",
        "tos_matcher(a0)", "tag_matcher(<b0>)", "result_cell(P0)",
        "priority_encoder(nostack)", "priority_encoder(stack)",
    ]
    cell = dp.of_kind(Kind.RESULT_CELL)[0]
    assert cell.group is Group.STACK
    enc = {b.group: b for b in dp.of_kind(Kind.PRIORITY_ENCODER)}
    assert enc[Group.STACK].inputs == (cell.block_id,)
    b0 = dp.of_kind(Kind.TAG_MATCHER)[1]
    assert dp.block(b0.port("gate")).kind is Kind.TOS_MATCHER
    dp.validate()


def test_decoded_topology_matches_undecoded():
    plain = compile_profiles(["a0/b0"], UNOP)
    dec = compile_profiles(["a0/b0"], UNOP_CD)
    assert kinds(dec) == ["char_decoder"] + kinds(plain)
    for b in dec.of_kind(Kind.TAG_MATCHER):
        assert b.area_bits == 4
        assert b.port("data") == dec.of_kind(Kind.CHAR_DECODER)[0].block_id
    assert [b.area_bits for b in dec.of_kind(Kind.NEGATION)] == [5]


def test_per_matcher_area_law():
    assert comparator_bits(b"<a0>", decoded=False) == 32
    assert comparator_bits(b"<a0>", decoded=True) == 4
    plain = area_report(compile_profiles(["a0"], UNOP))
    dec = area_report(compile_profiles(["a0"], UNOP_CD))
    assert plain.per_kind["tag_matcher"] == 32
    assert dec.per_kind["tag_matcher"] == 4
    assert dec.per_kind["char_decoder"] == DECODER_AREA
    # one-profile report: the matcher plus a one-input encoder
    assert plain.total_bits == 32 + 1


def test_empty_forest_rejected():
    with pytest.raises(EmptyForest):
        lower_to_datapath(PrefixForest([]))


def test_sharing_reuses_prefix_chain():
    profiles = ["a0//b0//c0//d0", "a0//b0//c0//e0"]
    unop = compile_profiles(profiles, UNOP)
    comp = compile_profiles(profiles, COMP)
    assert len(unop.of_kind(Kind.TAG_MATCHER)) == 8
    assert len(comp.of_kind(Kind.TAG_MATCHER)) == 5
    assert area_report(comp).total_bits < area_report(unop).total_bits


def test_area_report_json():
    rep = area_report(compile_profiles(["a0/b0", "a0//c0"], COMP_CD))
    body = json.loads(rep.to_json())
    assert body["config"] == "Com-P-CharDec"
    assert body["total_bits"] == sum(body["per_kind"].values())
    assert body["block_count"] == sum(body["kind_counts"].values())


def test_stack_depth_sets_area():
    dp = compile_profiles(["a0/b0"], DatapathConfig(False, False, max_depth=8))
    assert dp.of_kind(Kind.STACK)[0].area_bits == 8 * 16


def test_config_names():
    assert [c.name for c in SCENARIOS] == ["Unop", "Com-P", "Unop-CharDec", "Com-P-CharDec"]
    assert DatapathConfig.from_name("com-p-chardec") == COMP_CD
    with pytest.raises(ValueError):
        DatapathConfig.from_name("fast")


def test_netlist_goldens():
    assert emit_netlist(compile_profiles(["a0/b0"])) == (GOLDEN / "netlist_child_unop.vhd").read_text()
    dec = compile_profiles(["a0//b0"], UNOP_CD)
    assert emit_netlist(dec) == (GOLDEN / "netlist_desc_chardec.vhd").read_text()


def test_netlist_one_matcher_per_tag():
    text = emit_netlist(compile_profiles(["a0//b0//c0"]))
    assert text.count("entity work.tag_matcher") == 3


def test_netlist_deterministic():
    profiles = ["a0/b0//c0", "a0/b0//d0", "//e0/f0", "g0"]
    for cfg in SCENARIOS:
        assert emit_netlist(compile_profiles(profiles, cfg)) == emit_netlist(compile_profiles(profiles, cfg))


def test_sixteen_profile_layout():
    # half the profiles use the stack, half do not
    profiles = [f"a{k % 4}/b{k}" for k in range(8)] + [f"c{k % 4}//d{k}" for k in range(8)]
    dp = compile_profiles(profiles, COMP_CD)
    text = emit_netlist(dp)
    assert text.count("entity work.priority_encoder") == 2
    assert text.count("entity work.stack_block") == 1
    assert text.count("entity work.tag_filter") == 1
    assert text.count("entity work.char_decoder") == 1
    enc = {b.group: b for b in dp.of_kind(Kind.PRIORITY_ENCODER)}
    assert len(enc[Group.STACK].inputs) == 8
    assert len(enc[Group.NO_STACK].inputs) == 8


profile = st.builds(
    lambda lead, first, rest: lead + first + "".join(a + t for a, t in rest),
    st.sampled_from(["", "//"]),
    st.sampled_from(["a0", "b0", "c0"]),
    st.lists(st.tuples(st.sampled_from(["/", "//"]), st.sampled_from(["a0", "b0", "c0", "d0"])), max_size=4),
)


@given(st.lists(profile, min_size=1, max_size=12))
@settings(max_examples=100)
def test_structural_invariants(profiles):
    for cfg in SCENARIOS:
        dp = compile_profiles(profiles, cfg)
        dp.validate()
        counts = {k: len(dp.of_kind(k)) for k in Kind}
        assert counts[Kind.PRIORITY_ENCODER] == 2
        assert counts[Kind.RESULT_CELL] == len(profiles)
        uses_stack = any("/" in p.lstrip("/").replace("//", "") for p in profiles)
        assert counts[Kind.STACK] == counts[Kind.TAG_FILTER] == int(uses_stack)
        assert counts[Kind.CHAR_DECODER] == int(cfg.char_decoded)
        # every matcher chain is driven by the stream or the shared decoder
        source = dp.of_kind(Kind.CHAR_DECODER)[0].block_id if cfg.char_decoded else STREAM
        assert all(b.port("data") == source for b in dp.of_kind(Kind.TAG_MATCHER))
        # sharing never costs area
        if cfg.prefix_shared:
            unshared = compile_profiles(profiles, DatapathConfig(False, cfg.char_decoded))
            assert area_report(dp).total_bits <= area_report(unshared).total_bits
        # unshared area is additive over profiles, apart from fixed blocks
        if not cfg.prefix_shared:
            per = [area_report(compile_profiles([p], cfg)) for p in profiles]
            fixed = lambda r: sum(v for k, v in r.per_kind.items()
                                  if k in ("char_decoder", "tag_filter", "stack_block"))
            variable = sum(r.total_bits - fixed(r) for r in per)
            whole = area_report(dp)
            assert whole.total_bits - fixed(whole) == variable
