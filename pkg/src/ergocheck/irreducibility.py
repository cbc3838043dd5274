"""Irreducibility checks for the candidate state space.

Two paths: no conservation (candidate space is the full nonnegative
integer lattice) and conserved (product of a lattice over the unconserved
species with the finite enumerated conserved set).  Both combine exact
rank/lattice/feasibility conditions with the producibility level
construction run forwards and on the arrow-flipped structure.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .lfp import LfpOutcome, LfpProblem, solve_lfp
from .linalg import RationalMatrix, hermite_normal_form, lattice_spans_full, rank
from .network import inverse_structure, stoichiometry_matrix

IRREDUCIBLE_PROVEN = "IRREDUCIBLE_PROVEN"
NECESSARY_CONDITION_FAILED = "NECESSARY_CONDITION_FAILED"
INCONCLUSIVE = "INCONCLUSIVE"


@dataclass(frozen=True)
class LevelDecomposition:
    """Producibility levels G_1, G_2, ... with cumulative sets H_l."""

    levels: tuple  # tuple of frozensets of species indices
    cumulative: tuple
    exhaustive: bool
    uncovered: frozenset


@dataclass(frozen=True)
class ConservedClassAnalysis:
    """Single-step and reachability structure of the conserved chain for a
    given available-species set A."""

    available: frozenset
    z: tuple  # n_c x n_c 0/1 rows
    omega: tuple
    classes: tuple  # tuple of frozensets of state indices
    closed_flags: tuple
    eta: int  # number of closed classes

    @property
    def num_classes(self):
        return len(self.classes)

    def closed_classes(self):
        return tuple(
            c for c, flag in zip(self.classes, self.closed_flags) if flag
        )


@dataclass(frozen=True)
class IrreducibilityVerdict:
    status: str
    failed_condition: str | None
    rank_value: int
    rank_required: int
    lattice_ok: bool
    hnf_pivots: tuple
    lfp_outcome: LfpOutcome | None
    forward_levels: LevelDecomposition | None
    inverse_levels: LevelDecomposition | None
    class_analysis: ConservedClassAnalysis | None = None
    diagnostic: str = ""


def _split(vec, d_u):
    return vec[:d_u], vec[d_u:]


def fireable_reactions(s, available, cs=None, e=None):
    """Reactions whose unconserved reactants all lie in `available` and
    whose conserved reactant demand is met by state `e` (when given)."""
    d_u = cs.d_u if cs is not None else s.num_species
    out = set()
    for k, (nu, _) in enumerate(s.pairs):
        bar, hat = _split(nu, d_u)
        if any(c and i not in available for i, c in enumerate(bar)):
            continue
        if e is not None and any(ei < hi for ei, hi in zip(e, hat)):
            continue
        out.add(k)
    return out


def reachability_closure(z):
    """Boolean (I + Z)^(n-1) via repeated squaring on the 0/1 semiring."""
    z = np.asarray(z, dtype=bool)
    n = z.shape[0]
    base = z | np.eye(n, dtype=bool)
    result = np.eye(n, dtype=bool)
    power = n - 1
    while power:
        if power & 1:
            result = (result.astype(np.uint8) @ base.astype(np.uint8)) > 0
        base_next = (base.astype(np.uint8) @ base.astype(np.uint8)) > 0
        base = base_next
        power >>= 1
    return result


def conserved_class_analysis(s, cs, available):
    """Transition matrix Z(A), reachability, equivalence classes and the
    number of closed classes over the enumerated conserved states."""
    states = cs.conserved_states
    index = {e: i for i, e in enumerate(states)}
    n_c = len(states)
    d_u = cs.d_u
    z = np.zeros((n_c, n_c), dtype=bool)
    for i, e in enumerate(states):
        for k in fireable_reactions(s, available, cs, e):
            nu, nu_p = s.pairs[k]
            hat = nu[d_u:]
            hat_p = nu_p[d_u:]
            target = tuple(ei - h + hp for ei, h, hp in zip(e, hat, hat_p))
            j = index.get(target)
            if j is not None:
                z[i, j] = True
    omega = reachability_closure(z)
    mutual = omega & omega.T
    assigned = [None] * n_c
    classes = []
    for i in range(n_c):
        if assigned[i] is None:
            members = frozenset(int(j) for j in np.nonzero(mutual[i])[0])
            for j in members:
                assigned[j] = len(classes)
            classes.append(members)
    closed_flags = []
    for members in classes:
        closed = True
        for i in members:
            for j in np.nonzero(z[i])[0]:
                if int(j) not in members:
                    closed = False
                    break
            if not closed:
                break
        closed_flags.append(closed)
    return ConservedClassAnalysis(
        available=frozenset(available),
        z=tuple(tuple(int(v) for v in row) for row in z),
        omega=tuple(tuple(int(v) for v in row) for row in omega),
        classes=tuple(classes),
        closed_flags=tuple(closed_flags),
        eta=sum(closed_flags),
    )


def level_decomposition(s):
    """Levels for the no-conservation case."""
    d = s.num_species
    species = set(range(d))
    supports = [
        (
            frozenset(i for i, c in enumerate(nu) if c),
            frozenset(i for i, c in enumerate(nu_p) if c),
        )
        for nu, nu_p in s.pairs
    ]
    h = set()
    levels = []
    cumulative = []
    while True:
        g = set()
        for nu_s, nup_s in supports:
            if nu_s <= h:
                g |= nup_s - h
        if not g:
            break
        h |= g
        levels.append(frozenset(g))
        cumulative.append(frozenset(h))
        if h == species:
            break
    return LevelDecomposition(
        levels=tuple(levels),
        cumulative=tuple(cumulative),
        exhaustive=h == species,
        uncovered=frozenset(species - h),
    )


def level_decomposition_conserved(s, cs):
    """Levels over the unconserved species, gated per closed class.

    A species enters level l only if every closed equivalence class of the
    conserved chain for availability H_{l-1} admits a reaction producing it.
    """
    d_u = cs.d_u
    species = set(range(d_u))
    h = set()
    levels = []
    cumulative = []
    while True:
        analysis = conserved_class_analysis(s, cs, h)
        closed = analysis.closed_classes()
        g = set()
        for i in species - h:
            ok = bool(closed)
            for members in closed:
                fireable = set()
                for idx in members:
                    fireable |= fireable_reactions(
                        s, h, cs, cs.conserved_states[idx]
                    )
                if not any(s.pairs[k][1][i] for k in fireable):
                    ok = False
                    break
            if ok:
                g.add(i)
        if not g:
            break
        h |= g
        levels.append(frozenset(g))
        cumulative.append(frozenset(h))
        if h == species:
            break
    return LevelDecomposition(
        levels=tuple(levels),
        cumulative=tuple(cumulative),
        exhaustive=h == species,
        uncovered=frozenset(species - h),
    )


def _positive_flux_lfp(m):
    """F1/F2: M v = 0 with v >= 1, encoded as -v <= -1."""
    k = m.ncols
    ineq = [{j: Fraction(-1)} for j in range(k)]
    b = [Fraction(-1)] * k
    return LfpProblem.build(ineq, b, [dict(r) for r in m.rows], [Fraction(0)] * m.nrows, k)


def _verdict(status, failed, **kw):
    defaults = dict(
        rank_value=-1,
        rank_required=-1,
        lattice_ok=False,
        hnf_pivots=(),
        lfp_outcome=None,
        forward_levels=None,
        inverse_levels=None,
        class_analysis=None,
        diagnostic="",
    )
    defaults.update(kw)
    return IrreducibilityVerdict(status=status, failed_condition=failed, **defaults)


def check_irreducibility(net, cs=None):
    """Run the irreducibility pipeline and return a verdict with
    self-verifying sub-certificates.

    Check order: rank, lattice span, closed-class count (conserved case),
    forward levels, positive-flux feasibility, inverse levels.  Rank,
    lattice, class-count and feasibility failures are failures of
    necessary conditions; level failures are inconclusive since the level
    construction is sufficient only.
    """
    m = stoichiometry_matrix(net)
    s = net.structure()
    conserved = cs is not None and cs.d_c > 0
    if conserved:
        m_bar = RationalMatrix(
            cs.d_u, m.ncols, [dict(r) for r in m.rows[: cs.d_u]]
        )
        target_rank = cs.d_u
    else:
        m_bar = m
        target_rank = net.num_species

    rank_value = rank(m_bar)
    common = dict(rank_value=rank_value, rank_required=target_rank)
    if rank_value != target_rank:
        return _verdict(
            NECESSARY_CONDITION_FAILED,
            "rank",
            diagnostic=f"rank {rank_value} < {target_rank}",
            **common,
        )

    hnf = hermite_normal_form(m_bar)
    pivots = tuple(p for _, _, p in hnf.pivots)
    lattice_ok = lattice_spans_full(m_bar, target_rank, hnf=hnf)
    common.update(lattice_ok=lattice_ok, hnf_pivots=pivots)
    if not lattice_ok:
        return _verdict(
            NECESSARY_CONDITION_FAILED,
            "lattice",
            diagnostic="integer column span is a proper sublattice",
            **common,
        )

    analysis = None
    if conserved:
        if not cs.conserved_states:
            return _verdict(
                NECESSARY_CONDITION_FAILED,
                "eta",
                diagnostic="EmptyConservedSpace: no conserved state matches the totals",
                **common,
            )
        analysis = conserved_class_analysis(s, cs, frozenset(range(cs.d_u)))
        common.update(class_analysis=analysis)
        if analysis.num_classes != 1 or analysis.eta != 1:
            return _verdict(
                NECESSARY_CONDITION_FAILED,
                "eta",
                diagnostic=(
                    f"{analysis.num_classes} equivalence classes"
                    f" ({analysis.eta} closed); need a single closed class"
                    " covering the conserved states"
                ),
                **common,
            )

    forward = (
        level_decomposition_conserved(s, cs) if conserved else level_decomposition(s)
    )
    common.update(forward_levels=forward)
    if not forward.exhaustive:
        return _verdict(
            INCONCLUSIVE,
            "forward-exhaustive",
            diagnostic=f"species not producible from nothing: {sorted(forward.uncovered)}",
            **common,
        )

    lfp_outcome = solve_lfp(_positive_flux_lfp(m_bar))
    common.update(lfp_outcome=lfp_outcome)
    if not lfp_outcome.feasible:
        return _verdict(
            NECESSARY_CONDITION_FAILED,
            "lfp",
            diagnostic="no strictly positive flux vector with zero net effect",
            **common,
        )

    inv = inverse_structure(s)
    inverse = (
        level_decomposition_conserved(inv, cs) if conserved else level_decomposition(inv)
    )
    common.update(inverse_levels=inverse)
    if not inverse.exhaustive:
        return _verdict(
            INCONCLUSIVE,
            "inverse-exhaustive",
            diagnostic=(
                "inverse structure leaves species uncovered: "
                f"{sorted(inverse.uncovered)}"
            ),
            **common,
        )

    return _verdict(IRREDUCIBLE_PROVEN, None, **common)
