"""Shared test utilities: independent oracles and instance generators.

The oracles here deliberately avoid the code paths they check: the LFP
oracle is an exhaustive rational grid search, lattice equality is decided
through canonical forms plus exact determinants, and reachability is BFS.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

import numpy as np

from ergocheck import LfpProblem, RationalMatrix


def det_exact(dense):
    """Determinant of a small dense rational matrix by exact elimination."""
    n = len(dense)
    m = [[Fraction(v) for v in row] for row in dense]
    det = Fraction(1)
    for c in range(n):
        pivot = next((r for r in range(c, n) if m[r][c] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != c:
            m[c], m[pivot] = m[pivot], m[c]
            det = -det
        det *= m[c][c]
        inv = 1 / m[c][c]
        for r in range(c + 1, n):
            f = m[r][c] * inv
            if f:
                for j in range(c, n):
                    m[r][j] -= f * m[c][j]
    return det


def random_int_matrix(rng, max_rows=6, max_cols=8, lo=-4, hi=4):
    rows = rng.randint(1, max_rows)
    cols = rng.randint(1, max_cols)
    return RationalMatrix.from_dense(
        [[rng.randint(lo, hi) for _ in range(cols)] for _ in range(rows)]
    )


# --- rational grid oracle for small LFPs ------------------------------

GRID_NUMERATORS = [
    k for k in range(-36, 37) if k % 3 == 0 or k % 4 == 0
]  # exactly the rationals p/q in [-3, 3] with 1 <= q <= 4, scaled by 12


def _stacked_rows(problem):
    rows = []
    for r in problem.a.rows:
        rows.append([int(r.get(j, 0)) for j in range(problem.num_vars)])
    for r in problem.a_eq.rows:
        rows.append([int(r.get(j, 0)) for j in range(problem.num_vars)])
    return rows


def oracle_box_sufficient(problem):
    """True when every feasible instance provably has a grid solution.

    All n x n minors of the stacked constraint matrix (box rows included)
    must have |det| <= 4; then any vertex of the boxed feasible set has
    coordinates with denominator at most 4, i.e. it lies on the grid.
    """
    n = problem.num_vars
    rows = _stacked_rows(problem)
    for i in range(n):
        unit = [0] * n
        unit[i] = 1
        rows.append(list(unit))
    for subset in itertools.combinations(range(len(rows)), n):
        sub = [rows[i] for i in subset]
        d = det_exact(sub)
        if abs(d) > 4:
            return False
    return True


def grid_feasible(problem):
    """Exhaustive search over the denominator-<=4 grid in [-3, 3]^n.

    Exact: grid points are k/12 with integer k, so A v <= b becomes the
    integer comparison A k <= 12 b.
    """
    n = problem.num_vars
    pts = np.array(
        list(itertools.product(GRID_NUMERATORS, repeat=n)), dtype=np.int64
    ).T  # n x P
    ok = np.ones(pts.shape[1], dtype=bool)
    for row, b in zip(problem.a.rows, problem.b):
        coeff = np.array([int(row.get(j, 0)) for j in range(n)], dtype=np.int64)
        ok &= coeff @ pts <= 12 * int(b)
    for row, b in zip(problem.a_eq.rows, problem.b_eq):
        coeff = np.array([int(row.get(j, 0)) for j in range(n)], dtype=np.int64)
        ok &= coeff @ pts == 12 * int(b)
    if not ok.any():
        return None
    k = pts[:, int(np.argmax(ok))]
    return tuple(Fraction(int(v), 12) for v in k)


def random_boxed_lfp(rng):
    """Random small instance whose feasible set lies inside [-3, 3]^n.

    Integer constraints must have all rationals exactly representable; b
    values are skewed so both statuses occur.
    """
    n = rng.randint(1, 3)
    ineq = []
    b = []
    for _ in range(rng.randint(1, 3)):
        ineq.append({j: rng.randint(-2, 2) for j in range(n)})
        b.append(rng.randint(-3, 3))
    eq, b_eq = [], []
    if rng.random() < 0.4:
        eq.append({j: rng.randint(-1, 1) for j in range(n)})
        b_eq.append(rng.randint(-2, 2))
    for j in range(n):  # box rows keep the feasible set bounded
        ineq.append({j: 1})
        b.append(3)
        ineq.append({j: -1})
        b.append(3)
    return LfpProblem.build(ineq, b, eq, b_eq, n)


# --- network generators -----------------------------------------------


def cascade_text(d):
    """Exhaustive birth/degradation/conversion cascade: d species, 3d reactions."""
    lines = []
    for i in range(1, d + 1):
        if i == 1:
            lines.append("0 -> X1 ; 1")
        else:
            lines.append(f"X{i-1} -> X{i-1} + X{i} ; 1")
        lines.append(f"X{i} -> 0 ; 1")
        nxt = i + 1 if i < d else 1
        lines.append(f"X{i} -> X{nxt} ; 1")
    return "\n".join(lines) + "\n"


def random_network_text(rng, max_species=4, max_reactions=5):
    """Random well-formed network text (orders kept <= 2)."""
    d = rng.randint(1, max_species)
    species = [f"Y{i}" for i in range(d)]
    k = rng.randint(1, max_reactions)
    lines = [f"species: {' '.join(species)}"]

    def side():
        order = rng.randint(0, 2)
        counts = [0] * d
        for _ in range(order):
            counts[rng.randrange(d)] += 1
        terms = [
            (f"{c}*{species[i]}" if c > 1 else species[i])
            for i, c in enumerate(counts)
            if c
        ]
        return " + ".join(terms) if terms else "0"

    for _ in range(k):
        rate = rng.choice(["1", "2", "1/2", "0.25", "3"])
        lines.append(f"{side()} -> {side()} ; {rate}")
    return "\n".join(lines) + "\n"


def bfs_reachability(z):
    """0/1 reachability-in-<=n-1-steps matrix by plain BFS (oracle)."""
    n = len(z)
    out = [[0] * n for _ in range(n)]
    for start in range(n):
        seen = {start}
        frontier = [start]
        while frontier:
            nxt = []
            for i in frontier:
                for j in range(n):
                    if z[i][j] and j not in seen:
                        seen.add(j)
                        nxt.append(j)
            frontier = nxt
        for j in seen:
            out[start][j] = 1
    return out
