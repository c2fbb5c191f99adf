"""Wiring a tripartite box into an effective bipartite box.

A wiring splits the three parties into a solo party and an ordered pair.  The
solo side is passed through untouched: its effective input x' feeds its
original input and its output is the effective output a'.  On the paired
side, the effective input y' = s' determines the first actor's input through
alpha, the second actor's input through beta (which may also read the first
actor's output, making the wiring type II), and the pair's effective output
b' comes from gamma applied to s' and both outputs.

Boolean functions are packed into truth-table integers: bit j holds the value
at packed argument index j, arguments packed big-endian with the first
argument most significant.  So alpha is 2 bits (index s'), beta 4 bits
(index 2*s' + w1) and gamma 8 bits (index 4*s' + 2*w1 + w2).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product

from .boxes import (
    BITS,
    Box2,
    Box3,
    PARTY_NAMES,
    ZERO,
    ParseError,
    index2,
    require_valid,
)
from . import bell


@dataclass(frozen=True)
class Bipartition:
    """One party alone versus the remaining pair (pair kept in party order)."""

    solo: int
    pair: tuple[int, int]

    @property
    def name(self) -> str:
        return f"{PARTY_NAMES[self.solo]}|{PARTY_NAMES[self.pair[0]]}{PARTY_NAMES[self.pair[1]]}"

    @classmethod
    def from_name(cls, name: str) -> "Bipartition":
        for bp in BIPARTITIONS:
            if bp.name == name.strip():
                return bp
        raise ParseError(f"unknown bipartition {name!r}, expected one of "
                         + ", ".join(bp.name for bp in BIPARTITIONS))


BIPARTITIONS = (
    Bipartition(0, (1, 2)),
    Bipartition(1, (0, 2)),
    Bipartition(2, (0, 1)),
)


@dataclass(frozen=True)
class Wiring:
    """(bipartition, actor order, alpha, beta, gamma) with truth-table ints.

    ordering 0 means pair[0] acts first, 1 means pair[1] does.  beta ignoring
    its w1 argument makes the wiring type I (no output-to-input feed).
    """

    bipartition: Bipartition
    ordering: int
    alpha: int
    beta: int
    gamma: int

    def __post_init__(self):
        if self.ordering not in BITS:
            raise ParseError(f"ordering must be 0 or 1, got {self.ordering}")
        for field, value, width in (
            ("alpha", self.alpha, 4),
            ("beta", self.beta, 16),
            ("gamma", self.gamma, 256),
        ):
            if not 0 <= value < width:
                raise ParseError(f"{field} truth table out of range: {value}")

    def actors(self) -> tuple[int, int]:
        """(first, second) acting parties of the pair."""
        p0, p1 = self.bipartition.pair
        return (p0, p1) if self.ordering == 0 else (p1, p0)

    @property
    def is_type_i(self) -> bool:
        return all(
            (self.beta >> (2 * s)) & 1 == (self.beta >> (2 * s + 1)) & 1
            for s in BITS
        )

    def encode(self) -> str:
        first, second = self.actors()
        return (
            f"bp={self.bipartition.name} "
            f"order={PARTY_NAMES[first]},{PARTY_NAMES[second]} "
            f"alpha={self.alpha} beta={self.beta} gamma={self.gamma}"
        )

    @classmethod
    def parse(cls, text: str) -> "Wiring":
        fields = {}
        for token in text.split():
            if "=" not in token:
                raise ParseError(f"bad wiring token {token!r}")
            key, value = token.split("=", 1)
            if key in fields:
                raise ParseError(f"duplicate wiring field {key!r}")
            fields[key] = value
        missing = {"bp", "order", "alpha", "beta", "gamma"} - set(fields)
        if missing:
            raise ParseError(f"wiring encoding missing fields: {sorted(missing)}")
        bp = Bipartition.from_name(fields["bp"])
        order_parts = fields["order"].split(",")
        if len(order_parts) != 2:
            raise ParseError(f"bad order field {fields['order']!r}")
        try:
            first, second = (PARTY_NAMES.index(p.strip()) for p in order_parts)
        except ValueError as exc:
            raise ParseError(f"bad order field {fields['order']!r}") from exc
        if {first, second} != set(bp.pair):
            raise ParseError(
                f"order parties {fields['order']!r} do not match bipartition {bp.name}"
            )
        try:
            alpha, beta, gamma = (
                int(fields[k]) for k in ("alpha", "beta", "gamma")
            )
        except ValueError as exc:
            raise ParseError("alpha, beta, gamma must be integers") from exc
        return cls(bp, 0 if first == bp.pair[0] else 1, alpha, beta, gamma)


_IN_W3 = (32, 16, 8)
_OUT_W3 = (4, 2, 1)


def _apply_raw(table, w: Wiring) -> tuple[Fraction, ...]:
    """Effective 16-entry table; assumes the source already validated."""
    solo = w.bipartition.solo
    first, second = w.actors()
    sw_i, fw_i, gw_i = _IN_W3[solo], _IN_W3[first], _IN_W3[second]
    sw_o, fw_o, gw_o = _OUT_W3[solo], _OUT_W3[first], _OUT_W3[second]
    alpha, beta, gamma = w.alpha, w.beta, w.gamma
    acc = [ZERO] * 16
    for sp in BITS:
        u1 = (alpha >> sp) & 1
        for w1 in BITS:
            u2 = (beta >> (2 * sp + w1)) & 1
            base = u1 * fw_i + u2 * gw_i + w1 * fw_o
            for w2 in BITS:
                bout = (gamma >> (4 * sp + 2 * w1 + w2)) & 1
                base2 = base + w2 * gw_o
                for xp in BITS:
                    for ap in BITS:
                        v = table[base2 + xp * sw_i + ap * sw_o]
                        if v:
                            acc[8 * xp + 4 * sp + 2 * ap + bout] += v
    return tuple(acc)


def apply_wiring(box: Box3, w: Wiring, check: bool = True) -> Box2:
    """Effective bipartite box P(a'b'|x'y') of the wiring.

    The pair's branch with first output w1 is read at the input triple whose
    second input is beta(s', w1); no-signalling of the source makes this the
    correct sequential probability, with the 0 * (0/0) = 0 convention built
    in (a zero-probability branch contributes zero to every entry).
    """
    if check:
        require_valid(box)
    return Box2(_apply_raw(box.table, w))


@dataclass(frozen=True)
class EffectiveBoxDerivation:
    """apply_wiring plus per-entry provenance.

    contributions[i] lists the flat tripartite indices whose values were
    summed into effective entry i.
    """

    source: Box3
    wiring: Wiring
    result: Box2
    contributions: tuple[tuple[int, ...], ...]


def derive_effective_box(box: Box3, w: Wiring) -> EffectiveBoxDerivation:
    require_valid(box)
    solo = w.bipartition.solo
    first, second = w.actors()
    acc = [ZERO] * 16
    contrib = [[] for _ in range(16)]
    for sp in BITS:
        u1 = (w.alpha >> sp) & 1
        for w1 in BITS:
            u2 = (w.beta >> (2 * sp + w1)) & 1
            for w2 in BITS:
                bout = (w.gamma >> (4 * sp + 2 * w1 + w2)) & 1
                for xp in BITS:
                    for ap in BITS:
                        src = (
                            xp * _IN_W3[solo]
                            + u1 * _IN_W3[first]
                            + u2 * _IN_W3[second]
                            + ap * _OUT_W3[solo]
                            + w1 * _OUT_W3[first]
                            + w2 * _OUT_W3[second]
                        )
                        i = index2(ap, bout, xp, sp)
                        v = box.table[src]
                        if v:
                            acc[i] += v
                            contrib[i].append(src)
    return EffectiveBoxDerivation(
        box, w, Box2(tuple(acc)), tuple(tuple(sorted(c)) for c in contrib)
    )


def apply_wiring_fixed_inputs(box: Box3, w: Wiring, check: bool = True) -> Box2:
    """Type-I evaluation path: fix both pair inputs, then aggregate by gamma.

    Only valid when beta ignores the first actor's output; the result must
    agree entry for entry with apply_wiring.
    """
    if not w.is_type_i:
        raise ParseError("fixed-input evaluation needs a type-I wiring")
    if check:
        require_valid(box)
    solo = w.bipartition.solo
    first, second = w.actors()
    acc = [ZERO] * 16
    for sp in BITS:
        u1 = (w.alpha >> sp) & 1
        u2 = (w.beta >> (2 * sp)) & 1
        for xp in BITS:
            base = xp * _IN_W3[solo] + u1 * _IN_W3[first] + u2 * _IN_W3[second]
            # Plain conditional block at fixed inputs, grouped by the pair's
            # effective output.
            for ap, w1, w2 in product(BITS, repeat=3):
                v = box.table[
                    base
                    + ap * _OUT_W3[solo]
                    + w1 * _OUT_W3[first]
                    + w2 * _OUT_W3[second]
                ]
                if v:
                    bout = (w.gamma >> (4 * sp + 2 * w1 + w2)) & 1
                    acc[index2(ap, bout, xp, sp)] += v
    return Box2(tuple(acc))


_WIRING_CACHE: dict[tuple[int, str], tuple[Wiring, ...]] = {}


def enumerate_wirings(bp: Bipartition, kind: str = "all") -> list[Wiring]:
    """All wirings on a bipartition in canonical (ordering, alpha, beta,
    gamma) order; 32768 in total, 8192 of them type I."""
    if kind not in ("all", "typeI", "typeII"):
        raise ParseError(f"kind must be all, typeI or typeII, got {kind!r}")
    key = (bp.solo, kind)
    if key not in _WIRING_CACHE:
        out = []
        for ordering, alpha, beta, gamma in product(
            BITS, range(4), range(16), range(256)
        ):
            w = Wiring(bp, ordering, alpha, beta, gamma)
            if kind == "typeI" and not w.is_type_i:
                continue
            if kind == "typeII" and w.is_type_i:
                continue
            out.append(w)
        _WIRING_CACHE[key] = tuple(out)
    return list(_WIRING_CACHE[key])


_FUNCTIONALS = {
    "chsh_max": bell.chsh_max,
    "uffink_max": bell.uffink_max,
}


def search_max(box: Box3, functional: str) -> tuple[Wiring, Fraction]:
    """Exact maximum of a relabeling-invariant functional over all wirings.

    Returns the lexicographically first maximizing wiring in the canonical
    (bipartition, ordering, alpha, beta, gamma) enumeration order.
    """
    result = search_max_all(box, (functional,))
    return result[functional]


def search_max_all(
    box: Box3, functionals: tuple[str, ...] = ("chsh_max", "uffink_max")
) -> dict[str, tuple[Wiring, Fraction]]:
    """Run several functionals over one wiring sweep, sharing the effective
    boxes; same tie-break as search_max for each."""
    for f in functionals:
        if f not in _FUNCTIONALS:
            raise ParseError(f"unknown functional {f!r}")
    require_valid(box)
    table = box.table
    best: dict[str, tuple[Wiring, Fraction]] = {}
    cache: dict[str, dict] = {f: {} for f in functionals}
    for bp in BIPARTITIONS:
        for w in enumerate_wirings(bp):
            eff = _apply_raw(table, w)
            eff_box = None
            for f in functionals:
                v = cache[f].get(eff)
                if v is None:
                    if eff_box is None:
                        eff_box = Box2(eff)
                    v = _FUNCTIONALS[f](eff_box)
                    cache[f][eff] = v
                if f not in best or v > best[f][1]:
                    best[f] = (w, v)
    return best


def distinct_effective_boxes(box: Box3) -> dict[tuple[Fraction, ...], Wiring]:
    """Map each distinct effective table over all wirings of all bipartitions
    to the first wiring producing it (canonical enumeration order)."""
    require_valid(box)
    table = box.table
    seen: dict[tuple[Fraction, ...], Wiring] = {}
    for bp in BIPARTITIONS:
        for w in enumerate_wirings(bp):
            eff = _apply_raw(table, w)
            if eff not in seen:
                seen[eff] = w
    return seen
