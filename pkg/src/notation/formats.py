"""Single dispatch point for the three codecs, keyed by format name."""

from __future__ import annotations

from .json_codec import decode_json, encode_json
from .toon_codec import decode_toon, encode_toon
from .tron_codec import decode_tron, encode_tron
from .values import Object, Value

__all__ = ["FORMATS", "encode_doc", "decode_doc", "wraps_root"]

FORMATS = ("json", "toon", "tron")


def _check(fmt: str) -> None:
    if fmt not in FORMATS:
        raise ValueError(f"unknown format {fmt!r}")


def wraps_root(v: Value, fmt: str) -> bool:
    """True when encoding v in fmt adds the synthetic root key."""
    return fmt == "toon" and not isinstance(v, Object)


def encode_doc(v: Value, fmt: str) -> str:
    _check(fmt)
    if fmt == "json":
        return encode_json(v)
    if fmt == "toon":
        return encode_toon(v)
    return encode_tron(v)


def decode_doc(text: str, fmt: str, *, unwrap: bool = False) -> Value:
    _check(fmt)
    if fmt == "json":
        return decode_json(text)
    if fmt == "toon":
        return decode_toon(text, unwrap=unwrap)
    return decode_tron(text)
