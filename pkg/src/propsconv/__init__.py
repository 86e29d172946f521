"""Convert Stanford dependency trees into PROPS proposition graphs."""

from .conll import DepArc, DepTree, Token, parse_conll, serialize_conll, validate
from .converter import ConversionError, ConverterConfig, convert
from .graph import NodeKind, PropEdge, PropGraph, PropNode, RelationLabel
from .graph import deserialize_json, render_dot, serialize_json

__version__ = "0.1.0"

__all__ = [
    "ConversionError", "ConverterConfig", "DepArc", "DepTree", "NodeKind", "PropEdge",
    "PropGraph", "PropNode", "RelationLabel", "Token", "convert", "deserialize_json",
    "parse_conll", "render_dot", "serialize_conll", "serialize_json", "validate",
]
