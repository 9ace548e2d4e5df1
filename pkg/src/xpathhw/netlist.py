"""Structural VHDL-style netlist text for a :class:`Datapath`.

The output is deterministic: block order, signal names and generics depend
only on the datapath, so identical inputs give byte-identical text.
"""

from __future__ import annotations

from .datapath import STREAM, Block, Datapath, Group, Kind

_HEADER = """\
library ieee;
use ieee.std_logic_1164.all;
"""

# kind -> (generics, ports); every entity also gets clk and rst
_ENTITIES = {
    Kind.CHAR_DECODER: ((), (("data", "in", "std_logic_vector(7 downto 0)"),
                             ("q", "out", "std_logic_vector(255 downto 0)"))),
    Kind.TAG_MATCHER: ((("PATTERN", "string"), ("DECODED", "boolean"), ("ANCHORED", "boolean")),
                       (("data", "in", "std_logic_vector"),
                        ("enable", "in", "std_logic := '1'"),
                        ("reset", "in", "std_logic := '0'"),
                        ("gate", "in", "std_logic := '1'"),
                        ("q", "out", "std_logic"))),
    Kind.NEGATION: ((("PATTERN", "string"), ("DECODED", "boolean")),
                    (("data", "in", "std_logic_vector"), ("q", "out", "std_logic"))),
    Kind.TAG_FILTER: ((), (("data", "in", "std_logic_vector(7 downto 0)"),
                           ("q", "out", "std_logic_vector(17 downto 0)"))),
    Kind.STACK: ((("MAX_DEPTH", "natural"),),
                 (("tags", "in", "std_logic_vector(17 downto 0)"),
                  ("q", "out", "std_logic_vector(15 downto 0)"))),
    Kind.TOS_MATCHER: ((("EXPECTED", "string"),),
                       (("stack", "in", "std_logic_vector(15 downto 0)"), ("q", "out", "std_logic"))),
    Kind.RESULT_CELL: ((("PROFILE_ID", "natural"),), (("match", "in", "std_logic"), ("q", "out", "std_logic"))),
    Kind.PRIORITY_ENCODER: ((("WIDTH", "natural"),),
                            (("d", "in", "std_logic_vector"), ("q", "out", "std_logic_vector"))),
}


def _output_type(block: Block) -> str:
    if block.kind is Kind.CHAR_DECODER:
        return "std_logic_vector(255 downto 0)"
    if block.kind is Kind.TAG_FILTER:
        return "std_logic_vector(17 downto 0)"
    if block.kind is Kind.STACK:
        return "std_logic_vector(15 downto 0)"
    if block.kind is Kind.PRIORITY_ENCODER:
        return f"std_logic_vector({_id_width(len(block.ports)) - 1} downto 0)"
    return "std_logic"


def _id_width(n: int) -> int:
    # one extra code for "no match"
    return max(1, n.bit_length())


def _generics(block: Block) -> list[str]:
    k = block.kind
    if k is Kind.TAG_MATCHER:
        return [f'PATTERN => "{block.pattern.decode("ascii")}"',
                f"DECODED => {str(block.decoded).lower()}",
                f"ANCHORED => {str(block.anchored).lower()}"]
    if k is Kind.NEGATION:
        return [f'PATTERN => "{block.pattern.decode("ascii")}"', f"DECODED => {str(block.decoded).lower()}"]
    if k is Kind.STACK:
        return [f"MAX_DEPTH => {block.max_depth}"]
    if k is Kind.TOS_MATCHER:
        return [f'EXPECTED => "{block.code}"']
    if k is Kind.RESULT_CELL:
        return [f"PROFILE_ID => {block.profile_id}"]
    if k is Kind.PRIORITY_ENCODER:
        return [f"WIDTH => {len(block.ports)}"]
    return []


def _wire(src: int, dst: int, port: str) -> str:
    return f"w_{'in' if src == STREAM else src}_{dst}_{port}"


def emit_netlist(dp: Datapath, name: str = "xpath_filter") -> str:
    kinds = []
    for block in dp.blocks:
        if block.kind not in kinds:
            kinds.append(block.kind)
    out = [f"-- structural netlist, configuration {dp.config.name}, {len(dp.blocks)} blocks", _HEADER]

    for kind in kinds:
        generics, ports = _ENTITIES[kind]
        out.append(f"entity {kind.value} is")
        if generics:
            out.append("  generic (" + "; ".join(f"{g} : {t}" for g, t in generics) + ");")
        port_decl = ["clk : in std_logic", "rst : in std_logic"] + [f"{p} : {d} {t}" for p, d, t in ports]
        out.append("  port (" + "; ".join(port_decl) + ");")
        out.append(f"end entity {kind.value};")
        out.append("")

    encoders = {b.group: b for b in dp.of_kind(Kind.PRIORITY_ENCODER)}
    top_ports = ["clk : in std_logic", "rst : in std_logic", "xml_in : in std_logic_vector(7 downto 0)"]
    for group in (Group.NO_STACK, Group.STACK):
        top_ports.append(f"match_{group.value} : out {_output_type(encoders[group])}")
    out.append(f"entity {name} is")
    out.append("  port (" + ";\n        ".join(top_ports) + ");")
    out.append(f"end entity {name};")
    out.append("")
    out.append(f"architecture structural of {name} is")
    for block in dp.blocks:
        out.append(f"  signal b{block.block_id}_q : {_output_type(block)};")
    edges = dp.edges()
    for src, dst, port in edges:
        kind = "std_logic_vector(7 downto 0)" if src == STREAM else _output_type(dp.block(src))
        out.append(f"  signal {_wire(src, dst, port)} : {kind};")
    out.append("begin")
    for src, dst, port in edges:
        driver = "xml_in" if src == STREAM else f"b{src}_q"
        out.append(f"  {_wire(src, dst, port)} <= {driver};")
    for block in dp.blocks:
        generics = _generics(block)
        assoc = ["clk => clk", "rst => rst"]
        for k, (port, src) in enumerate(block.ports):
            target = f"d({k})" if block.kind is Kind.PRIORITY_ENCODER else port
            assoc.append(f"{target} => {_wire(src, block.block_id, port)}")
        assoc.append(f"q => b{block.block_id}_q")
        line = f"  u{block.block_id} : entity work.{block.kind.value}"
        if generics:
            line += " generic map (" + ", ".join(generics) + ")"
        line += " port map (" + ", ".join(assoc) + ");"
        out.append(line)
    for group in (Group.NO_STACK, Group.STACK):
        out.append(f"  match_{group.value} <= b{encoders[group].block_id}_q;")
    out.append("end architecture structural;")
    return "\n".join(out) + "\n"
