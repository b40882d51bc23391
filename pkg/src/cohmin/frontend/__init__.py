from .cli import cli_main, main
from .dot import to_dot
from .fileformat import (
    parse_model,
    parse_regex_protocol,
    parse_sfst,
    parse_trace,
    parse_transducer,
    parse_valued_trace,
    serialize_model,
    serialize_sfst,
    serialize_trace,
    serialize_transducer,
    serialize_valued_trace,
)

__all__ = [
    "cli_main",
    "main",
    "to_dot",
    "parse_model",
    "parse_regex_protocol",
    "parse_sfst",
    "parse_trace",
    "parse_transducer",
    "parse_valued_trace",
    "serialize_model",
    "serialize_sfst",
    "serialize_trace",
    "serialize_transducer",
    "serialize_valued_trace",
]
