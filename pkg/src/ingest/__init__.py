from .construct import ProfileSource, SourceKind, aconstruct_from, construct_from, detect_kind
from .readers import from_document, from_literal, parse_canonical, read_canonical, to_canonical_dict, write_canonical

__all__ = [
    "ProfileSource",
    "SourceKind",
    "aconstruct_from",
    "construct_from",
    "detect_kind",
    "from_document",
    "from_literal",
    "parse_canonical",
    "read_canonical",
    "to_canonical_dict",
    "write_canonical",
]
