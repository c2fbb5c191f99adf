"""Bell-type functionals and information-causality witnesses.

Correlators use the 0 -> +1, 1 -> -1 output convention.  The fixed CHSH form
is E00 + E01 + E10 - E11 and the quadratic Uffink form is
(E00 + E10)^2 + (E01 - E11)^2; the *_max variants take the maximum of the
fixed form over the full 128-element bipartite relabeling group (party swap,
input flips, per-input output flips), so they are relabeling invariants.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product

from .boxes import (
    BITS,
    Box2,
    Box3,
    ZERO,
    ArityError,
    ParseError,
    all_relabelings2,
    correlator,
    index2,
    relabel,
)


def correlator_table(box: Box2) -> tuple[Fraction, Fraction, Fraction, Fraction]:
    """(E00, E01, E10, E11) with Exy indexed by 2*x + y."""
    out = []
    for x, y in product(BITS, repeat=2):
        e = ZERO
        for a, b in product(BITS, repeat=2):
            v = box.table[index2(a, b, x, y)]
            if v:
                e += v if a == b else -v
        out.append(e)
    return tuple(out)


def chsh(box: Box2) -> Fraction:
    e = correlator_table(box)
    return e[0] + e[1] + e[2] - e[3]


def uffink(box: Box2) -> Fraction:
    e = correlator_table(box)
    return (e[0] + e[2]) ** 2 + (e[1] - e[3]) ** 2


def _basis_box(u: int, v: int) -> Box2:
    # Valid box whose correlator table is the (u, v) indicator.
    return Box2.from_function(
        lambda a, b, x, y: Fraction(1 + (1 if a == b else -1) * (x == u) * (y == v), 4)
    )


_ACTIONS = None


def _correlator_actions() -> tuple[tuple[tuple[int, ...], tuple[int, ...]], ...]:
    """Action of each of the 128 relabelings on the correlator table.

    Every group element acts as a signed permutation: relabeled Exy equals
    sgn[i] * E[src[i]] at position i.  Derived once by pushing the four basis
    boxes through relabel(), then deduplicated; evaluating the deduplicated
    set is exactly evaluating the whole orbit.
    """
    global _ACTIONS
    if _ACTIONS is not None:
        return _ACTIONS
    basis = [_basis_box(u, v) for u, v in product(BITS, repeat=2)]
    actions = set()
    for r in all_relabelings2():
        src = [None] * 4
        sgn = [None] * 4
        for col, bx in enumerate(basis):
            e = correlator_table(relabel(bx, r))
            hits = [i for i, val in enumerate(e) if val]
            assert len(hits) == 1 and abs(e[hits[0]]) == 1
            src[hits[0]] = col
            sgn[hits[0]] = 1 if e[hits[0]] > 0 else -1
        actions.add((tuple(src), tuple(sgn)))
    _ACTIONS = tuple(sorted(actions))
    return _ACTIONS


def chsh_max(box: Box2) -> Fraction:
    """Maximum of |CHSH| over the full relabeling orbit of the box."""
    e = correlator_table(box)
    best = ZERO
    for src, sgn in _correlator_actions():
        v = (
            sgn[0] * e[src[0]]
            + sgn[1] * e[src[1]]
            + sgn[2] * e[src[2]]
            - sgn[3] * e[src[3]]
        )
        if v < 0:
            v = -v
        if v > best:
            best = v
    return best


def uffink_max(box: Box2) -> Fraction:
    """Maximum of the Uffink form over the full relabeling orbit of the box."""
    e = correlator_table(box)
    best = ZERO
    for src, sgn in _correlator_actions():
        v = (sgn[0] * e[src[0]] + sgn[2] * e[src[2]]) ** 2 + (
            sgn[1] * e[src[1]] - sgn[3] * e[src[3]]
        ) ** 2
        if v > best:
            best = v
    return best


@dataclass(frozen=True)
class IcVerdict:
    """Information-causality verdict for a bipartite box.

    witness is 'chsh' when chsh_max^2 > 8, else 'uffink' when uffink_max > 4,
    else None; value carries the witnessing functional's value.
    """

    violated: bool
    witness: str | None
    value: Fraction | None

    @classmethod
    def from_values(cls, chsh_value: Fraction, uffink_value: Fraction) -> "IcVerdict":
        if chsh_value * chsh_value > 8:
            return cls(True, "chsh", chsh_value)
        if uffink_value > 4:
            return cls(True, "uffink", uffink_value)
        return cls(False, None, None)


def ic_witness(box: Box2) -> IcVerdict:
    return IcVerdict.from_values(chsh_max(box), uffink_max(box))


@dataclass(frozen=True)
class GyniWeights:
    """Nonnegative weights q(x1,x2,x3) summing to 1, flat index 4x1+2x2+x3."""

    q: tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.q) != 8:
            raise ArityError(f"need 8 weights, got {len(self.q)}")
        q = tuple(Fraction(v) for v in self.q)
        object.__setattr__(self, "q", q)
        if any(v < 0 for v in q):
            raise ValueError("weights must be nonnegative")
        if sum(q) != 1:
            raise ValueError(f"weights sum to {sum(q)}, not 1")

    @classmethod
    def uniform_even_parity(cls) -> "GyniWeights":
        """1/4 on each input triple of even parity, the canonical game."""
        return cls(
            tuple(
                Fraction(1, 4) if (x1 ^ x2 ^ x3) == 0 else ZERO
                for x1, x2, x3 in product(BITS, repeat=3)
            )
        )


def gyni_value(box: Box3, weights: GyniWeights) -> Fraction:
    """Probability that each party outputs its right neighbour's input."""
    total = ZERO
    for x1, x2, x3 in product(BITS, repeat=3):
        w = weights.q[4 * x1 + 2 * x2 + x3]
        if w:
            total += w * box.prob(x2, x3, x1, x1, x2, x3)
    return total


def gyni_bound(weights: GyniWeights) -> Fraction:
    """No-signalling bound: max over input triples of q(x) + q(complement x)."""
    best = ZERO
    for i in range(8):
        s = weights.q[i] + weights.q[7 - i]
        if s > best:
            best = s
    return best


def k_value(box: Box3) -> Fraction:
    """15/2 + <A1B1C1>/2 - 2(<A0B0C0> + <A0B1> + <B0C1> + <A1C0>).

    Nonnegative on every local deterministic box; its minimum over the
    no-signalling set is -1.
    """
    c = lambda parties, ins: correlator(box, parties, ins)
    return (
        Fraction(15, 2)
        + Fraction(1, 2) * c((0, 1, 2), (1, 1, 1))
        - 2
        * (
            c((0, 1, 2), (0, 0, 0))
            + c((0, 1), (0, 1))
            + c((1, 2), (0, 1))
            + c((0, 2), (1, 0))
        )
    )


def sos_identity_check() -> bool:
    """Verify the sum-of-squares decomposition of the k expression.

    With alpha = A1C0, beta = A0B1, gamma = A0B0C0, delta = B0C1 evaluated on
    all 64 sign assignments of the six observables, the three-square form
    ((alpha*beta + gamma*delta)/2 - 1)^2 + 2((alpha + beta)/2 - 1)^2
    + 2((gamma + delta)/2 - 1)^2 must equal the k expression term for term,
    with every square nonnegative.
    """
    for a0, a1, b0, b1, c0, c1 in product((1, -1), repeat=6):
        alpha = a1 * c0
        beta = a0 * b1
        gamma = a0 * b0 * c0
        delta = b0 * c1
        t1 = (Fraction(alpha * beta + gamma * delta, 2) - 1) ** 2
        t2 = 2 * (Fraction(alpha + beta, 2) - 1) ** 2
        t3 = 2 * (Fraction(gamma + delta, 2) - 1) ** 2
        k = (
            Fraction(15, 2)
            + Fraction(a1 * b1 * c1, 2)
            - 2 * (a0 * b0 * c0 + a0 * b1 + b0 * c1 + a1 * c0)
        )
        if t1 + t2 + t3 != k or t1 < 0 or t2 < 0 or t3 < 0:
            return False
    return True


# Weight file format: one line per input triple, "x1 x2 x3 = num/den",
# '#' comments, omitted triples are zero.

def parse_gyni_weights(text: str) -> GyniWeights:
    q = [ZERO] * 8
    seen = set()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split("=")
        if len(parts) != 2:
            raise ParseError(f"line {lineno}: cannot parse weight line {raw!r}")
        bits = parts[0].split()
        if len(bits) != 3 or any(t not in ("0", "1") for t in bits):
            raise ParseError(f"line {lineno}: expected three input bits")
        key = 4 * int(bits[0]) + 2 * int(bits[1]) + int(bits[2])
        if key in seen:
            raise ParseError(f"line {lineno}: duplicate weight for {parts[0].strip()}")
        seen.add(key)
        try:
            q[key] = Fraction(parts[1].strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ParseError(f"line {lineno}: bad value {parts[1].strip()!r}") from exc
    try:
        return GyniWeights(tuple(q))
    except ValueError as exc:
        raise ParseError(str(exc)) from exc


def dumps_gyni_weights(weights: GyniWeights) -> str:
    lines = []
    for x1, x2, x3 in product(BITS, repeat=3):
        lines.append(f"{x1} {x2} {x3} = {weights.q[4 * x1 + 2 * x2 + x3]}")
    return "\n".join(lines) + "\n"
