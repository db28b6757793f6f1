"""The mean-descriptor mini-language.

Grammar (no whitespace; reals are plain decimal literals, optionally signed,
with optional fraction and exponent — never inf or nan)::

    descriptor := "power:" REAL
                | "qa:" gen
                | "gini:" REAL "," REAL
                | "conj(" gen "," descriptor ")"
                | "ext(" descriptor ")"
    gen        := "power:" REAL | "log" | "exp:" REAL

``qa:log`` is the alias of ``qa:power:0``. Trailing characters after a
complete descriptor are rejected.
"""

from __future__ import annotations

import re

from .errors import ParseError
from .generators import ExpGen, GeneratorDescriptor, PowerGen
from .means import (
    ConjugateMean,
    ExtendedMean,
    GiniMean,
    MeanDescriptor,
    PowerMean,
    QuasiArithmeticMean,
)

__all__ = ["parse_descriptor", "format_descriptor", "parse_generator", "format_generator"]

_REAL = re.compile(r"[+-]?(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?")


class _Cursor:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def literal(self, s: str) -> bool:
        if self.text.startswith(s, self.pos):
            self.pos += len(s)
            return True
        return False

    def expect(self, s: str) -> None:
        if not self.literal(s):
            raise ParseError(f"expected {s!r} at position {self.pos} in {self.text!r}")

    def real(self) -> float:
        m = _REAL.match(self.text, self.pos)
        if not m:
            raise ParseError(f"expected a decimal literal at position {self.pos} in {self.text!r}")
        self.pos = m.end()
        return float(m.group())

    def done(self) -> bool:
        return self.pos == len(self.text)


def _parse_gen(cur: _Cursor) -> GeneratorDescriptor:
    if cur.literal("power:"):
        return PowerGen(cur.real())
    if cur.literal("log"):
        return PowerGen(0.0)
    if cur.literal("exp:"):
        a = cur.real()
        if a == 0.0:
            raise ParseError("exp generator requires a nonzero coefficient")
        return ExpGen(a)
    raise ParseError(f"expected a generator at position {cur.pos} in {cur.text!r}")


def _parse_mean(cur: _Cursor) -> MeanDescriptor:
    if cur.literal("power:"):
        return PowerMean(cur.real())
    if cur.literal("qa:"):
        return QuasiArithmeticMean(_parse_gen(cur))
    if cur.literal("gini:"):
        r = cur.real()
        cur.expect(",")
        return GiniMean(r, cur.real())
    if cur.literal("conj("):
        gen = _parse_gen(cur)
        cur.expect(",")
        base = _parse_mean(cur)
        cur.expect(")")
        return ConjugateMean(base=base, gen=gen)
    if cur.literal("ext("):
        base = _parse_mean(cur)
        cur.expect(")")
        return ExtendedMean(base)
    raise ParseError(f"expected a mean descriptor at position {cur.pos} in {cur.text!r}")


def parse_descriptor(text: str) -> MeanDescriptor:
    """Parse a descriptor string; trailing garbage is an error."""
    cur = _Cursor(text.strip())
    mean = _parse_mean(cur)
    if not cur.done():
        raise ParseError(f"trailing characters {cur.text[cur.pos:]!r} after descriptor")
    return mean


def parse_generator(text: str) -> GeneratorDescriptor:
    """Parse a bare generator string (``power:R``, ``log``, ``exp:A``)."""
    cur = _Cursor(text.strip())
    gen = _parse_gen(cur)
    if not cur.done():
        raise ParseError(f"trailing characters {cur.text[cur.pos:]!r} after generator")
    return gen


def _num(v: float) -> str:
    return repr(float(v))


def format_generator(gen: GeneratorDescriptor) -> str:
    if isinstance(gen, PowerGen):
        return "log" if gen.r == 0.0 else f"power:{_num(gen.r)}"
    if isinstance(gen, ExpGen):
        return f"exp:{_num(gen.a)}"
    raise ParseError(f"{type(gen).__name__} is not representable in the mini-language")


def format_descriptor(mean: MeanDescriptor) -> str:
    """Inverse of :func:`parse_descriptor`; round-trips to an equal descriptor."""
    if isinstance(mean, PowerMean):
        return f"power:{_num(mean.r)}"
    if isinstance(mean, QuasiArithmeticMean):
        gen = mean.gen
        if isinstance(gen, PowerGen) and gen.r == 0.0:
            return "qa:log"
        return f"qa:{format_generator(gen)}"
    if isinstance(mean, GiniMean):
        return f"gini:{_num(mean.r)},{_num(mean.s)}"
    if isinstance(mean, ConjugateMean):
        return f"conj({format_generator(mean.gen)},{format_descriptor(mean.base)})"
    if isinstance(mean, ExtendedMean):
        return f"ext({format_descriptor(mean.base)})"
    raise ParseError(f"{type(mean).__name__} is not representable in the mini-language")
