"""Exact rational linear feasibility with verifiable certificates.

Problems are systems  A x = b, x >= 0  with sparse rows and Fraction data.
lp_feasible answers with either a feasible point or a Farkas witness y
satisfying  y^T A <= 0 componentwise and y^T b > 0; both certificate kinds
re-verify by direct substitution into the original system.

The solver presolves rows with zero right-hand side whose live coefficients
all share one sign (every column they touch is forced to zero), then runs a
phase-1 revised simplex with Bland's rule on what remains.  Farkas witnesses
found on the reduced system are lifted back through the presolve steps, so
certificates always refer to the caller's row and column indices.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction

ZERO = Fraction(0)
ONE = Fraction(1)


class LPError(Exception):
    """Inconsistent solver state; indicates a bug, not bad input."""


@dataclass(frozen=True)
class LPProblem:
    """Equality-constrained feasibility problem over nonnegative variables.

    rows is a tuple of (entries, rhs) with entries a tuple of (column,
    coefficient) pairs; coefficients may be int or Fraction, zero
    coefficients are allowed and ignored.
    """

    num_vars: int
    rows: tuple

    def __post_init__(self):
        for entries, _ in self.rows:
            for col, _ in entries:
                if not 0 <= col < self.num_vars:
                    raise LPError(f"column {col} out of range")


@dataclass(frozen=True)
class LPCertificate:
    """Either a feasible point (sparse, by column) or a Farkas witness
    (sparse, by row).  verify() re-checks exactly against a problem."""

    feasible: bool
    point: tuple | None
    farkas: tuple | None

    def point_dict(self) -> dict:
        return dict(self.point or ())

    def farkas_dict(self) -> dict:
        return dict(self.farkas or ())

    def verify(self, problem: LPProblem) -> bool:
        if self.feasible:
            x = self.point_dict()
            if any(v < 0 for v in x.values()):
                return False
            if any(not 0 <= c < problem.num_vars for c in x):
                return False
            for entries, rhs in problem.rows:
                total = ZERO
                for col, coeff in entries:
                    xv = x.get(col)
                    if xv is not None and coeff:
                        total += coeff * xv
                if total != rhs:
                    return False
            return True
        y = self.farkas_dict()
        if any(not 0 <= r < len(problem.rows) for r in y):
            return False
        col_sums: dict[int, Fraction] = {}
        rhs_sum = ZERO
        for r, yv in y.items():
            entries, rhs = problem.rows[r]
            rhs_sum += yv * rhs
            for col, coeff in entries:
                if coeff:
                    col_sums[col] = col_sums.get(col, ZERO) + yv * coeff
        if rhs_sum <= 0:
            return False
        return all(s <= 0 for s in col_sums.values())

    def to_text(self) -> str:
        if self.feasible:
            lines = ["feasible"]
            for col, v in sorted(self.point or ()):
                lines.append(f"{col} = {v}")
        else:
            lines = ["infeasible"]
            for row, v in sorted(self.farkas or ()):
                lines.append(f"{row} = {v}")
        return "\n".join(lines) + "\n"


def _lift_farkas(problem: LPProblem, steps: list, farkas: dict) -> dict:
    """Extend a witness of the reduced system to the full system.

    steps holds (row, sign, live_entries) in elimination order; each restored
    row gets the multiplier -sign * M with M large enough that every column
    the step removed keeps a nonpositive aggregate.  Restored multipliers
    pair with zero right-hand sides, so y^T b is untouched.
    """
    if not steps:
        return farkas
    # Column access over the full matrix, restricted to columns that some
    # step removed (the only ones whose aggregates change).
    removed = set()
    for _, _, live in steps:
        removed.update(col for col, _ in live)
    col_entries: dict[int, list] = {c: [] for c in removed}
    for r, (entries, _) in enumerate(problem.rows):
        for col, coeff in entries:
            if coeff and col in removed:
                col_entries[col].append((r, coeff))
    for row, sign, live in reversed(steps):
        m = ZERO
        for col, coeff in live:
            t = ZERO
            for r, c in col_entries[col]:
                yv = farkas.get(r)
                if yv is not None:
                    t += yv * c
            need = t / abs(coeff)
            if need > m:
                m = need
        if m:
            farkas[row] = -sign * m
    return farkas


def _presolve(problem: LPProblem):
    """Fix to zero every column touched by a same-sign zero-rhs row.

    Returns (col_alive, active_rows, steps) or an infeasibility certificate
    when a row with no live columns has nonzero right-hand side.
    """
    n = problem.num_vars
    m = len(problem.rows)
    col_alive = [True] * n
    row_alive = [True] * m
    live_count = [0] * m
    for i, (entries, _) in enumerate(problem.rows):
        live_count[i] = sum(1 for _, coeff in entries if coeff)
    rows_by_col: dict[int, list] = {}
    for i, (entries, _) in enumerate(problem.rows):
        for col, coeff in entries:
            if coeff:
                rows_by_col.setdefault(col, []).append(i)
    steps: list = []
    queue = deque(range(m))
    queued = [True] * m
    while queue:
        i = queue.popleft()
        queued[i] = False
        if not row_alive[i]:
            continue
        entries, rhs = problem.rows[i]
        if live_count[i] == 0:
            if rhs != 0:
                farkas = {i: ONE if rhs > 0 else -ONE}
                return None, None, None, _lift_farkas(problem, steps, farkas)
            row_alive[i] = False
            continue
        if rhs != 0:
            continue
        live = [(col, coeff) for col, coeff in entries if coeff and col_alive[col]]
        if all(coeff > 0 for _, coeff in live):
            sign = 1
        elif all(coeff < 0 for _, coeff in live):
            sign = -1
        else:
            continue
        steps.append((i, sign, tuple(live)))
        row_alive[i] = False
        for col, _ in live:
            col_alive[col] = False
            for r in rows_by_col[col]:
                if row_alive[r]:
                    live_count[r] -= 1
                    if not queued[r]:
                        queue.append(r)
                        queued[r] = True
    active_rows = [i for i in range(m) if row_alive[i]]
    return col_alive, active_rows, steps, None


def _phase1(problem: LPProblem, col_alive, active_rows):
    """Phase-1 revised simplex on the reduced system.

    Returns (point, None) on feasibility or (None, farkas) where both use the
    original row and column ids.  Bland's rule (lowest-index entering column,
    lowest-label leaving variable) guarantees termination; artificials never
    re-enter, which just restricts later iterations to a smaller problem with
    the same feasibility answer.
    """
    m = len(active_rows)
    if m == 0:
        return {}, None
    # Row signs flip so the right-hand side is nonnegative.
    sign = [ONE] * m
    b = []
    for pos, i in enumerate(active_rows):
        rhs = Fraction(problem.rows[i][1])
        if rhs < 0:
            sign[pos] = -ONE
            rhs = -rhs
        b.append(rhs)
    row_pos = {i: pos for pos, i in enumerate(active_rows)}
    cols: dict[int, list] = {}
    for i in active_rows:
        pos = row_pos[i]
        for col, coeff in problem.rows[i][0]:
            if coeff and col_alive[col]:
                cols.setdefault(col, []).append((pos, sign[pos] * coeff))
    col_ids = sorted(cols)

    binv = [[ONE if i == j else ZERO for j in range(m)] for i in range(m)]
    basis: list = [("art", pos) for pos in range(m)]  # ("var", col) once replaced
    xb = b[:]

    while True:
        art_rows = [i for i in range(m) if basis[i][0] == "art"]
        obj = sum((xb[i] for i in art_rows), ZERO)
        if obj == 0:
            point = {}
            for i in range(m):
                kind, ident = basis[i]
                if kind == "var" and xb[i]:
                    point[ident] = xb[i]
            return point, None
        # Duals of the phase-1 objective (artificial cost 1, structural 0).
        y = [ZERO] * m
        for i in art_rows:
            row = binv[i]
            for j in range(m):
                if row[j]:
                    y[j] += row[j]
        entering = None
        for col in col_ids:
            reduced = ZERO
            for pos, coeff in cols[col]:
                yv = y[pos]
                if yv:
                    reduced -= yv * coeff
            if reduced < 0:
                entering = col
                break
        if entering is None:
            farkas = {}
            for pos, i in enumerate(active_rows):
                yv = sign[pos] * y[pos]
                if yv:
                    farkas[i] = yv
            return None, farkas
        d = [ZERO] * m
        for pos, coeff in cols[entering]:
            col_binv = [binv[i][pos] for i in range(m)]
            for i in range(m):
                if col_binv[i]:
                    d[i] += coeff * col_binv[i]
        leave = None
        best = None
        for i in range(m):
            if d[i] > 0:
                ratio = xb[i] / d[i]
                if best is None or ratio < best:
                    best = ratio
                    leave = i
                elif ratio == best:
                    # Bland tie-break on variable labels, structurals first.
                    cur = basis[leave]
                    cand = basis[i]
                    cur_key = (0, cur[1]) if cur[0] == "var" else (1, cur[1])
                    cand_key = (0, cand[1]) if cand[0] == "var" else (1, cand[1])
                    if cand_key < cur_key:
                        leave = i
        if leave is None:
            raise LPError("phase-1 objective unbounded; inconsistent state")
        piv = d[leave]
        lrow = binv[leave]
        if piv != 1:
            lrow = [v / piv for v in lrow]
            binv[leave] = lrow
        theta = xb[leave] / piv
        for i in range(m):
            if i != leave and d[i]:
                di = d[i]
                irow = binv[i]
                binv[i] = [iv - di * lv if lv else iv for iv, lv in zip(irow, lrow)]
                xb[i] -= di * theta
        xb[leave] = theta
        basis[leave] = ("var", entering)


def lp_feasible(problem: LPProblem, check: bool = True) -> LPCertificate:
    """Decide A x = b, x >= 0 and return a verifiable certificate."""
    col_alive, active_rows, steps, early = _presolve(problem)
    if early is not None:
        cert = LPCertificate(False, None, tuple(sorted(early.items())))
    else:
        point, farkas = _phase1(problem, col_alive, active_rows)
        if farkas is not None:
            farkas = _lift_farkas(problem, steps, farkas)
            cert = LPCertificate(False, None, tuple(sorted(farkas.items())))
        else:
            cert = LPCertificate(True, tuple(sorted(point.items())), None)
    if check and not cert.verify(problem):
        raise LPError("certificate failed self-verification")
    return cert
