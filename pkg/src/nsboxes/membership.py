"""Membership tests against the local set and the one-way-signalling set.

Both tests are exact LP feasibility problems over deterministic strategy
weights.  is_local decomposes a box over products of local response
functions.  is_tobl asks, for a fixed bipartition, for a single weight
vector over triples (solo strategy, pair strategy with pair[0] signalling
pair[1], pair strategy with pair[1] signalling pair[0]) whose two directional
readings both reproduce the box; feasibility means every wiring of that
bipartition yields a local effective box.

Strategy truth tables follow the package convention: bit j is the value at
packed argument index j, first argument most significant.  One-way pair
strategies are (sender output = f(sender input), receiver output = g(pair
inputs)) with g indexed by 2 * pair[0] input + pair[1] input regardless of
direction.  The lambda index of a strategy triple is

    solo_tt * 4096 + (f1 * 16 + g1) * 64 + (f2 * 16 + g2)

where route 1 has pair[0] sending and route 2 has pair[1] sending.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product

from .boxes import BITS, ONE, ZERO, ArityError, Box3, pack, require_valid
from .lp import LPCertificate, LPProblem, lp_feasible
from .wiring import Bipartition


def _bit(tt: int, i: int) -> int:
    return (tt >> i) & 1


def local_problem(box) -> LPProblem:
    """LP whose feasibility is locality: deterministic vertex weights matching
    every table entry plus normalization.  Vertex index is the big-endian
    stack of the per-party response truth tables."""
    n = box.n_parties
    size = len(box.table)
    rows_entries: list[list] = [[] for _ in range(size + 1)]
    num_cols = 4**n
    for col in range(num_cols):
        tts = [(col >> (2 * (n - 1 - p))) & 3 for p in range(n)]
        for ins in product(BITS, repeat=n):
            outs = tuple(_bit(tts[p], ins[p]) for p in range(n))
            rows_entries[pack(outs, ins)].append((col, 1))
        rows_entries[size].append((col, 1))
    rows = [
        (tuple(rows_entries[i]), box.table[i]) for i in range(size)
    ]
    rows.append((tuple(rows_entries[size]), ONE))
    return LPProblem(num_cols, tuple(rows))


def is_local(box) -> LPCertificate:
    """Exact locality test; the certificate carries vertex weights or a
    Farkas witness over table rows (row ids are flat table indices, the last
    row is normalization)."""
    require_valid(box)
    return lp_feasible(local_problem(box))


def _route_rows(bp: Bipartition, route: int):
    """For each (solo_tt, f, g) strategy of the given route, the 8 flat table
    indices it populates (one per input triple).

    Route 0: pair[0] sends, so pair[0] out = f(pair[0] in) and pair[1] out =
    g(inputs).  Route 1: pair[1] sends.
    """
    s = bp.solo
    p0, p1 = bp.pair
    sender, receiver = (p0, p1) if route == 0 else (p1, p0)
    table = {}
    for solo_tt in range(4):
        for f in range(4):
            for g in range(16):
                hits = []
                for ins in product(BITS, repeat=3):
                    outs = [0, 0, 0]
                    outs[s] = _bit(solo_tt, ins[s])
                    outs[sender] = _bit(f, ins[sender])
                    outs[receiver] = _bit(g, 2 * ins[p0] + ins[p1])
                    hits.append(pack(tuple(outs), ins))
                table[(solo_tt, f, g)] = tuple(hits)
    return table


def lambda_index(solo_tt: int, r1: tuple[int, int], r2: tuple[int, int]) -> int:
    return solo_tt * 4096 + (r1[0] * 16 + r1[1]) * 64 + (r2[0] * 16 + r2[1])


def decode_lambda(idx: int) -> tuple[int, tuple[int, int], tuple[int, int]]:
    solo_tt, rest = divmod(idx, 4096)
    r1, r2 = divmod(rest, 64)
    return solo_tt, divmod(r1, 16), divmod(r2, 16)


def tobl_problem(box: Box3, bp: Bipartition) -> LPProblem:
    """129-row, 16384-column LP: rows 0..63 are route-1 table equations (flat
    index), 64..127 route-2, 128 normalization."""
    rows_entries: list[list] = [[] for _ in range(129)]
    route1 = _route_rows(bp, 0)
    route2 = _route_rows(bp, 1)
    for solo_tt in range(4):
        for f1 in range(4):
            for g1 in range(16):
                hits1 = route1[(solo_tt, f1, g1)]
                base = solo_tt * 4096 + (f1 * 16 + g1) * 64
                for f2 in range(4):
                    for g2 in range(16):
                        col = base + f2 * 16 + g2
                        for row in hits1:
                            rows_entries[row].append((col, 1))
                        for row in route2[(solo_tt, f2, g2)]:
                            rows_entries[64 + row].append((col, 1))
                        rows_entries[128].append((col, 1))
    rows = []
    for i in range(64):
        rows.append((tuple(rows_entries[i]), box.table[i]))
    for i in range(64):
        rows.append((tuple(rows_entries[64 + i]), box.table[i]))
    rows.append((tuple(rows_entries[128]), ONE))
    return LPProblem(16384, tuple(rows))


def is_tobl(box: Box3, bp: Bipartition) -> LPCertificate:
    """Feasibility of a shared one-way-signalling model for both directions
    of the bipartition."""
    if not isinstance(box, Box3):
        raise ArityError("time-ordered decompositions are defined for Box3")
    require_valid(box)
    return lp_feasible(tobl_problem(box, bp))


@dataclass(frozen=True)
class ToblModel:
    """Sparse weights over strategy-triple lambda indices for a bipartition."""

    bipartition: Bipartition
    weights: tuple[tuple[int, Fraction], ...]

    def induced_box(self, route: int) -> Box3:
        """Box reproduced by reading every strategy triple along one route."""
        rows = _route_rows(self.bipartition, route)
        tab = [ZERO] * 64
        for idx, w in self.weights:
            solo_tt, r1, r2 = decode_lambda(idx)
            hits = rows[(solo_tt,) + (r1 if route == 0 else r2)]
            for row in hits:
                tab[row] += w
        return Box3(tuple(tab))


def verify_model(model: ToblModel, box: Box3) -> bool:
    """Both directional readings must reproduce the box exactly."""
    ws = [w for _, w in model.weights]
    if any(w < 0 for w in ws) or sum(ws) != 1:
        return False
    return (
        model.induced_box(0).table == box.table
        and model.induced_box(1).table == box.table
    )


def _tt1(fn) -> int:
    return fn(0) | (fn(1) << 1)


def _tt2(fn) -> int:
    tt = 0
    for i, j in product(BITS, repeat=2):
        tt |= fn(i, j) << (2 * i + j)
    return tt


def class4_tobl_model(bp: Bipartition) -> ToblModel:
    """The uniform two-bit-seed model for the class4 builtin.

    For solo party A and seed (l0, l1): a = l0 + (l0+l1)x; when B sends,
    b = l0 + l1 + l1*y and c = l1 + (l0+y)z; when C sends, c = l1 + (l0+1)z
    and b = l0 + (l1+z)(y+1).  The other bipartitions are the cyclic images
    (class4 is invariant under the party cycle).
    """
    entries = []
    w = Fraction(1, 4)
    for l0, l1 in product(BITS, repeat=2):
        if bp.solo == 0:  # pair (B, C), routes B->C and C->B
            solo_tt = _tt1(lambda x: l0 ^ ((l0 ^ l1) & x))
            r1 = (
                _tt1(lambda y: l0 ^ l1 ^ (l1 & y)),
                _tt2(lambda y, z: l1 ^ ((l0 ^ y) & z)),
            )
            r2 = (
                _tt1(lambda z: l1 ^ ((l0 ^ 1) & z)),
                _tt2(lambda y, z: l0 ^ ((l1 ^ z) & (y ^ 1))),
            )
        elif bp.solo == 1:  # pair (A, C), routes A->C and C->A
            solo_tt = _tt1(lambda y: l0 ^ ((l0 ^ l1) & y))
            r1 = (
                _tt1(lambda x: l1 ^ ((l0 ^ 1) & x)),
                _tt2(lambda x, z: l0 ^ ((l1 ^ x) & (z ^ 1))),
            )
            r2 = (
                _tt1(lambda z: l0 ^ l1 ^ (l1 & z)),
                _tt2(lambda x, z: l1 ^ ((l0 ^ z) & x)),
            )
        else:  # pair (A, B), routes A->B and B->A
            solo_tt = _tt1(lambda z: l0 ^ ((l0 ^ l1) & z))
            r1 = (
                _tt1(lambda x: l0 ^ l1 ^ (l1 & x)),
                _tt2(lambda x, y: l1 ^ ((l0 ^ x) & y)),
            )
            r2 = (
                _tt1(lambda y: l1 ^ ((l0 ^ 1) & y)),
                _tt2(lambda x, y: l0 ^ ((l1 ^ y) & (x ^ 1))),
            )
        entries.append((lambda_index(solo_tt, r1, r2), w))
    return ToblModel(bp, tuple(sorted(entries)))
