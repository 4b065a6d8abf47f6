"""Interval partitions of [0, 1] as families of similarities.

A partition is declared as an ordered list of blocks laid contiguously
from 0 to 1.  An :class:`Atom` is a single interval; a :class:`GeoTail` is
the countable family of intervals with lengths ``first * ratio**k``.
Each interval ``[c, c + a)`` is the image of ``[0, 1)`` under the
orientation preserving map ``t -> a*t + c``.

Symbols are ``(block, depth)`` pairs (depth is 0 for atoms) and words are
plain tuples of symbols.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union

from .errors import ConfigError, DegenerateBlock, MassNotOne

SCHEMA_VERSION = 1

ASC = "asc"
DESC = "desc"

Symbol = tuple  # (block index, depth)
Word = tuple  # tuple of symbols


def as_fraction(value) -> Fraction:
    """Coerce ints, Fractions and ``"p/q"`` strings; floats are refused."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool) or isinstance(value, float):
        raise ConfigError(f"expected an exact rational, got {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ConfigError(f"not a rational: {value!r}") from exc
    raise ConfigError(f"not a rational: {value!r}")


def fraction_str(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


@dataclass(frozen=True)
class Atom:
    length: Fraction

    def __post_init__(self):
        object.__setattr__(self, "length", as_fraction(self.length))
        if not 0 < self.length < 1:
            raise DegenerateBlock(f"atom length {self.length} not in (0,1)")

    @property
    def mass(self) -> Fraction:
        return self.length


@dataclass(frozen=True)
class GeoTail:
    first: Fraction
    ratio: Fraction
    direction: str = ASC

    def __post_init__(self):
        object.__setattr__(self, "first", as_fraction(self.first))
        object.__setattr__(self, "ratio", as_fraction(self.ratio))
        if self.direction not in (ASC, DESC):
            raise ConfigError(f"direction must be 'asc' or 'desc', got {self.direction!r}")
        if not 0 < self.first < 1:
            raise DegenerateBlock(f"tail first length {self.first} not in (0,1)")
        if not 0 < self.ratio < 1:
            raise DegenerateBlock(f"tail ratio {self.ratio} not in (0,1)")
        if self.mass > 1:
            raise DegenerateBlock(f"tail mass {self.mass} exceeds 1")

    @property
    def mass(self) -> Fraction:
        return self.first / (1 - self.ratio)

    def length(self, depth: int) -> Fraction:
        return self.first * self.ratio**depth

    def max_depth(self, lam: Fraction) -> int:
        """Largest depth whose length is >= lam, or -1 if none."""
        if self.first < lam:
            return -1
        k = 0
        a = self.first
        while a * self.ratio >= lam:
            a *= self.ratio
            k += 1
        return k


Block = Union[Atom, GeoTail]


class Scheme:
    """Compiled partition: a symbol table of contraction ratios and offsets.

    Instances are immutable; the lazily grown tail tables only memoise
    closed-form values.
    """

    def __init__(self, blocks: Sequence[Block]):
        self.blocks = tuple(blocks)
        offsets = []
        acc = Fraction(0)
        for b in self.blocks:
            offsets.append(acc)
            acc += b.mass
        self.offsets = tuple(offsets)
        self._mass = acc
        self._atoms = [
            ((i, 0), b.length, self.offsets[i])
            for i, b in enumerate(self.blocks)
            if isinstance(b, Atom)
        ]
        self._atoms_by_alpha = sorted(self._atoms, key=lambda t: -t[1])
        self.tail_blocks = tuple(i for i, b in enumerate(self.blocks) if isinstance(b, GeoTail))
        first = self.blocks[0] if self.blocks else None
        if isinstance(first, Atom) or (isinstance(first, GeoTail) and first.direction == ASC):
            self.zero_symbol = (0, 0)
        else:
            self.zero_symbol = None

    # -- basic structure -------------------------------------------------

    @property
    def is_finite(self) -> bool:
        return not self.tail_blocks

    def __eq__(self, other):
        return isinstance(other, Scheme) and self.blocks == other.blocks

    def __hash__(self):
        return hash(self.blocks)

    def __repr__(self):
        return f"Scheme({list(self.blocks)!r})"

    def check_symbol(self, sym) -> None:
        b, k = sym
        if not 0 <= b < len(self.blocks):
            raise KeyError(f"no block {b}")
        if isinstance(self.blocks[b], Atom) and k != 0:
            raise KeyError(f"atom symbol {sym} must have depth 0")
        if k < 0:
            raise KeyError(f"negative depth in {sym}")

    def alpha(self, sym) -> Fraction:
        b, k = sym
        block = self.blocks[b]
        if isinstance(block, Atom):
            return block.length
        return block.length(k)

    def left(self, sym) -> Fraction:
        b, k = sym
        block = self.blocks[b]
        off = self.offsets[b]
        if isinstance(block, Atom):
            return off
        a, r = block.first, block.ratio
        if block.direction == ASC:
            return off + a * (1 - r**k) / (1 - r)
        return off + a * r ** (k + 1) / (1 - r)

    @property
    def alpha_max(self) -> Fraction:
        return max(
            [a for _, a, _ in self._atoms]
            + [self.blocks[i].first for i in self.tail_blocks]
        )

    def symbols_at_least(self, lam: Fraction) -> list:
        """``(symbol, alpha, left)`` for every symbol with alpha >= lam, left to right."""
        out = []
        for i, b in enumerate(self.blocks):
            if isinstance(b, Atom):
                if b.length >= lam:
                    out.append(((i, 0), b.length, self.offsets[i]))
                continue
            kmax = b.max_depth(lam)
            depths = range(kmax + 1) if b.direction == ASC else range(kmax, -1, -1)
            for k in depths:
                s = (i, k)
                out.append((s, b.length(k), self.left(s)))
        return out

    def alphas_at_least(self, lam: Fraction) -> list:
        """Contraction ratios >= lam, with multiplicity, in decreasing order."""
        out = [a for _, a, _ in self._atoms_by_alpha if a >= lam]
        for i in self.tail_blocks:
            b = self.blocks[i]
            a = b.first
            while a >= lam:
                out.append(a)
                a *= b.ratio
        out.sort(reverse=True)
        return out


def build_scheme(spec: Iterable[Block]) -> Scheme:
    blocks = list(spec)
    if not blocks:
        raise ConfigError("a scheme needs at least one block")
    for b in blocks:
        if not isinstance(b, (Atom, GeoTail)):
            raise ConfigError(f"unknown block {b!r}")
    total = sum((b.mass for b in blocks), Fraction(0))
    if total != 1:
        raise MassNotOne(f"block masses sum to {total}, not 1")
    return Scheme(blocks)


def truncated_alphabet(scheme: Scheme, lam) -> list:
    lam = as_fraction(lam)
    return [s for s, _, _ in scheme.symbols_at_least(lam)]


def word_alpha(scheme: Scheme, word: Sequence) -> Fraction:
    a = Fraction(1)
    for s in word:
        a *= scheme.alpha(s)
    return a


def word_left_endpoint(scheme: Scheme, word: Sequence) -> Fraction:
    """T_v(0) by folding the maps from the innermost symbol outwards."""
    t = Fraction(0)
    for s in reversed(word):
        t = scheme.left(s) + scheme.alpha(s) * t
    return t


# -- config files ---------------------------------------------------------


def block_to_dict(b: Block) -> dict:
    if isinstance(b, Atom):
        return {"type": "atom", "length": fraction_str(b.length)}
    return {
        "type": "geotail",
        "first": fraction_str(b.first),
        "ratio": fraction_str(b.ratio),
        "direction": b.direction,
    }


def block_from_dict(d) -> Block:
    if not isinstance(d, dict):
        raise ConfigError(f"block must be a mapping, got {d!r}")
    kind = d.get("type")
    if kind == "atom":
        allowed = {"type", "length"}
    elif kind == "geotail":
        allowed = {"type", "first", "ratio", "direction"}
    else:
        raise ConfigError(f"unknown block type {kind!r}")
    extra = set(d) - allowed
    if extra:
        raise ConfigError(f"unknown block fields {sorted(extra)}")
    missing = allowed - set(d) - {"direction"}
    if missing:
        raise ConfigError(f"missing block fields {sorted(missing)}")
    if kind == "atom":
        return Atom(as_fraction(d["length"]))
    return GeoTail(as_fraction(d["first"]), as_fraction(d["ratio"]), d.get("direction", ASC))


def scheme_to_dict(scheme: Scheme) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "blocks": [block_to_dict(b) for b in scheme.blocks],
    }


def scheme_from_dict(d, strict: bool = True) -> Scheme:
    if not isinstance(d, dict):
        raise ConfigError("scheme config must be a mapping")
    version = d.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise ConfigError(f"unsupported schema_version {version!r}")
    if strict:
        extra = set(d) - {"schema_version", "blocks", "name"}
        if extra:
            raise ConfigError(f"unknown scheme fields {sorted(extra)}")
    if "blocks" not in d or not isinstance(d["blocks"], list):
        raise ConfigError("scheme config needs a 'blocks' list")
    return build_scheme(block_from_dict(b) for b in d["blocks"])


def dumps(scheme: Scheme) -> str:
    return json.dumps(scheme_to_dict(scheme), indent=2) + "\n"


def loads(text: str) -> Scheme:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed scheme JSON: {exc}") from exc
    return scheme_from_dict(data)


_GEO = re.compile(r"geo\(([^,()]+),([^,()]+)(?:,(asc|desc))?\)")


def parse_inline(text: str) -> Scheme:
    """Parse ``"1/2,1/3,1/6"`` or ``"1/2,geo(1/3,1/3,asc)"``."""
    text = text.replace(" ", "")
    if not text:
        raise ConfigError("empty scheme")
    blocks = []
    pos = 0
    while pos < len(text):
        m = _GEO.match(text, pos)
        if m:
            blocks.append(GeoTail(as_fraction(m.group(1)), as_fraction(m.group(2)), m.group(3) or ASC))
            pos = m.end()
        else:
            end = text.find(",", pos)
            end = len(text) if end < 0 else end
            blocks.append(Atom(as_fraction(text[pos:end])))
            pos = end
        if pos < len(text):
            if text[pos] != ",":
                raise ConfigError(f"unexpected {text[pos:]!r} in scheme")
            pos += 1
    return build_scheme(blocks)


def _f(p, q=1):
    return Fraction(p, q)


BUNDLED = {
    "dyadic": [Atom(_f(1, 2)), Atom(_f(1, 2))],
    "third": [Atom(_f(1, 3)), Atom(_f(2, 3))],
    "fig2": [Atom(_f(1, 2)), Atom(_f(1, 6)), Atom(_f(1, 3))],
    "fig3": [Atom(_f(1, 2)), GeoTail(_f(1, 3), _f(1, 3), ASC)],
    "eighths": [Atom(_f(1, 2)), Atom(_f(1, 4)), Atom(_f(1, 8)), Atom(_f(1, 8))],
    "sixths": [Atom(_f(1, 2)), Atom(_f(1, 3)), Atom(_f(1, 6))],
    "binary-tail": [GeoTail(_f(1, 2), _f(1, 2), ASC)],
    "binary-tail-desc": [GeoTail(_f(1, 2), _f(1, 2), DESC)],
    "rank-three": [Atom(_f(1, 2)), Atom(_f(1, 3)), GeoTail(_f(1, 7), _f(1, 7), ASC)],
}


def bundled(name: str) -> Scheme:
    try:
        return build_scheme(BUNDLED[name])
    except KeyError:
        raise ConfigError(f"unknown bundled scheme {name!r}; choose from {sorted(BUNDLED)}") from None


def resolve(text: str) -> Scheme:
    """A bundled name, a path to a JSON config, or an inline spec."""
    if text in BUNDLED:
        return bundled(text)
    if text.endswith(".json"):
        try:
            with open(text, encoding="utf-8") as fh:
                return loads(fh.read())
        except OSError as exc:
            raise ConfigError(f"cannot read scheme file {text}: {exc}") from exc
    return parse_inline(text)
