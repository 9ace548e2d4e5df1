"""Compile linear XPath filter profiles into a block-level matching datapath
and simulate it over encoded XML streams."""

__version__ = "0.1.0"

from .datapath import SCENARIOS, DatapathConfig, area_report, lower_to_datapath
from .dictionary import Dictionary, build_dictionary, decode_document, encode_document
from .netlist import emit_netlist
from .oracle import evaluate, match_document, parse_tree
from .profile import parse_profile, parse_profiles
from .regex import build_prefix_forest, expand_forest, lower_profile
from .simulator import Engine, MatchEvent, run, run_stream

__all__ = [
    "SCENARIOS", "DatapathConfig", "Dictionary", "Engine", "MatchEvent",
    "area_report", "build_dictionary", "build_prefix_forest", "decode_document",
    "emit_netlist", "encode_document", "evaluate", "expand_forest", "lower_profile",
    "lower_to_datapath", "match_document", "parse_profile", "parse_profiles",
    "parse_tree", "run", "run_stream",
]
