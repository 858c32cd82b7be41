"""Shared helpers: rational parsing, canonical JSON, deterministic parallelism."""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from typing import Any, Callable, Iterable, Sequence

import numpy as np


def parse_rational(value) -> Fraction:
    """Parse a rational given as Fraction, int, or a 'p/q' / 'p' string.

    Floats are rejected so that tolerance parameters stay exact.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, np.integer)):
        return Fraction(int(value))
    if isinstance(value, str):
        text = value.strip()
        if "/" in text:
            num, den = text.split("/", 1)
            return Fraction(int(num.strip()), int(den.strip()))
        return Fraction(int(text))
    raise TypeError(f"expected rational as int, Fraction or 'p/q' string, got {value!r}")


def format_rational(q: Fraction) -> str:
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def ceil_div(a: int, b: int) -> int:
    return -(-a // b)


def ceil_fraction(q: Fraction) -> int:
    return ceil_div(q.numerator, q.denominator)


def to_jsonable(obj: Any) -> Any:
    """Convert report objects to plain JSON-serializable data.

    Fractions become 'p/q' strings; numpy scalars/arrays become Python
    ints/floats/lists; objects exposing to_dict() are expanded.
    """
    if obj is None or isinstance(obj, (bool, int, str)):
        return obj
    if isinstance(obj, float):
        return obj
    if isinstance(obj, Fraction):
        return format_rational(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return [to_jsonable(x) for x in obj.tolist()]
    if hasattr(obj, "to_dict"):
        return to_jsonable(obj.to_dict())
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set, frozenset)):
        items = list(obj)
        if isinstance(obj, (set, frozenset)):
            items = sorted(items)
        return [to_jsonable(x) for x in items]
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def canonical_dumps(obj: Any) -> str:
    """Serialize deterministically: sorted keys, no whitespace variation."""
    return json.dumps(to_jsonable(obj), sort_keys=True, separators=(",", ":"))


def parallel_map(fn: Callable, items: Sequence, threads: int = 1) -> list:
    """Order-preserving map, optionally across a thread pool.

    Results are returned in input order regardless of completion order, so
    reports built from them do not depend on the thread count.
    """
    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def iter_bits(mask: int):
    """Yield set-bit positions of a Python int, ascending."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def popcount(mask: int) -> int:
    return mask.bit_count()


def isqrt_floor_fraction(q: Fraction, scale_bits: int = 40) -> Fraction:
    """A rational lower bound for sqrt(q), tight to about 2**-(scale_bits//2)."""
    if q < 0:
        raise ValueError("negative radicand")
    shift = 1 << scale_bits
    root = math.isqrt((q.numerator * shift * shift) // q.denominator)
    return Fraction(root, shift)
