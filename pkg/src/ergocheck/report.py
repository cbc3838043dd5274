"""Pipeline orchestration and report rendering.

`analyze` runs parse -> conservation -> reorder -> irreducibility -> drift
and maps the outcomes onto a four-way verdict; `verify` replaces the drift
solve with validation of an externally supplied witness.  Reports render
deterministically as human text or schema-stable JSON (rationals as
"p/q" strings).
"""

from __future__ import annotations

import hashlib
import json
import time
from dataclasses import dataclass
from fractions import Fraction

from . import drift as drift_mod
from . import irreducibility as irr_mod
from .errors import MissingTotals, OverlappingConservation, UnsupportedReactionOrder
from .network import (
    DEFAULT_MAX_STATES,
    enumerate_conserved_states,
    find_conservation_relations,
    parse_network,
    reorder_conserved_last,
    stoichiometry_matrix,
)
from .oracle import (
    batch_means,
    empirical_irreducibility_probe,
    gillespie_simulate,
    time_average,
    truncated_cme_stationary,
)

__version__ = "0.1.0"

PROVEN_ERGODIC = "PROVEN_ERGODIC"
IRREDUCIBILITY_DISPROVEN = "IRREDUCIBILITY_DISPROVEN"
INCONCLUSIVE = "INCONCLUSIVE"
UNSUPPORTED = "UNSUPPORTED"

DRIFT_CERTIFIED = "certified"
DRIFT_INFEASIBLE = "infeasible"
DRIFT_SKIPPED = "skipped"


@dataclass(frozen=True)
class ErgodicityReport:
    verdict: str
    network: object  # reordered ReactionNetwork
    conserved: object
    irreducibility: object
    classification: object
    drift_system: object
    certificate: object
    drift_status: str
    unsupported_reason: str
    oracle: dict | None
    timings: dict
    input_sha256: str
    version: str = __version__


def _fr(x):
    return str(Fraction(x))


def _hash(text):
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def analyze(
    text,
    totals=None,
    witness=None,
    oracle="off",
    seed=0,
    max_states=DEFAULT_MAX_STATES,
):
    """Full pipeline on network text; returns an ErgodicityReport.

    `witness` (sequence of rationals) switches the drift stage to
    verification of the supplied vector; a bad witness raises
    WitnessRejected.
    """
    timings = {}
    sha = _hash(text)
    start = time.perf_counter()
    net = parse_network(text)
    timings["parse"] = time.perf_counter() - start

    def unsupported(reason, cs=None, irr=None, rc=None):
        return ErgodicityReport(
            verdict=UNSUPPORTED,
            network=net,
            conserved=cs,
            irreducibility=irr,
            classification=rc,
            drift_system=None,
            certificate=None,
            drift_status=DRIFT_SKIPPED,
            unsupported_reason=reason,
            oracle=None,
            timings=timings,
            input_sha256=sha,
        )

    if any(r.order > 2 for r in net.reactions):
        k = next(k for k, r in enumerate(net.reactions) if r.order > 2)
        return unsupported(str(UnsupportedReactionOrder(k)))

    start = time.perf_counter()
    try:
        gammas = find_conservation_relations(stoichiometry_matrix(net))
    except OverlappingConservation as exc:
        timings["conservation"] = time.perf_counter() - start
        return unsupported(str(exc))
    cs = None
    if gammas:
        net, cs = reorder_conserved_last(net, gammas)
        if totals is None:
            names = [
                "+".join(
                    f"{g[i]}*{net.species[i]}" if g[i] > 1 else net.species[i]
                    for i in range(len(g))
                    if g[i]
                )
                for g in cs.gammas
            ]
            raise MissingTotals(
                "conservation relations detected, supply --conserved-totals "
                f"for: {', '.join(names)}"
            )
        cs = enumerate_conserved_states(cs, totals, max_states=max_states)
    timings["conservation"] = time.perf_counter() - start

    start = time.perf_counter()
    irr = irr_mod.check_irreducibility(net, cs)
    timings["irreducibility"] = time.perf_counter() - start

    start = time.perf_counter()
    rc = drift_mod.classify_reactions(net, cs)
    ds = drift_mod.build_drift_system(rc, net, cs)
    if witness is not None:
        cert = drift_mod.certificate_from_witness(witness, ds, cs)
    else:
        cert = drift_mod.check_negative_drift(ds, cs)
    timings["drift"] = time.perf_counter() - start

    if cert is not None and not drift_mod.verify_certificate(cert, ds):
        cert = None  # solver bug guard: never report an unverified certificate

    if irr.status == irr_mod.NECESSARY_CONDITION_FAILED:
        verdict = IRREDUCIBILITY_DISPROVEN
    elif irr.status == irr_mod.IRREDUCIBLE_PROVEN and cert is not None:
        verdict = PROVEN_ERGODIC
    else:
        verdict = INCONCLUSIVE

    oracle_data = None
    if oracle != "off":
        start = time.perf_counter()
        oracle_data = _run_oracle(oracle, net, cs, seed, max_states)
        timings["oracle"] = time.perf_counter() - start

    return ErgodicityReport(
        verdict=verdict,
        network=net,
        conserved=cs,
        irreducibility=irr,
        classification=rc,
        drift_system=ds,
        certificate=cert,
        drift_status=DRIFT_CERTIFIED if cert is not None else DRIFT_INFEASIBLE,
        unsupported_reason="",
        oracle=oracle_data,
        timings=timings,
        input_sha256=sha,
    )


def verify(text, witness, totals=None, **kw):
    """Irreducibility pipeline plus verification of a supplied witness."""
    return analyze(text, totals=totals, witness=witness, **kw)


def _initial_states(net, cs, variant):
    d_u = cs.d_u if cs is not None else net.num_species
    base = [0] * d_u if variant == 0 else [3] * d_u
    if cs is not None and cs.d_c > 0:
        e = cs.conserved_states[0 if variant == 0 else -1]
        return tuple(base) + tuple(e)
    return tuple(base)


def _run_oracle(mode, net, cs, seed, max_states):
    if mode == "ssa":
        runs = []
        constant = True
        for variant in (0, 1):
            x0 = _initial_states(net, cs, variant)
            traj = gillespie_simulate(net, x0, 500.0, seed + variant)
            if cs is not None:
                for gamma in cs.gammas:
                    ref = sum(g * x for g, x in zip(gamma, traj.states[0]))
                    for state in traj.states:
                        if sum(g * x for g, x in zip(gamma, state)) != ref:
                            constant = False
            averages = [
                time_average(traj, lambda s, i=i: s[i])
                for i in range(net.num_species)
            ]
            _, se = batch_means(traj, lambda s: s[0])
            runs.append(
                {
                    "initial_state": list(x0),
                    "seed": traj.seed,
                    "jumps": len(traj.states) - 1,
                    "time_averages": averages,
                    "first_species_se": se,
                }
            )
        return {"mode": "ssa", "runs": runs, "conservation_constant": constant}
    if mode == "cme":
        d_u = cs.d_u if cs is not None else net.num_species
        n_c = max(cs.n_c, 1) if cs is not None else 1
        budget = min(max_states, 50000) // n_c
        if d_u == 0 or budget < 2:
            return {"mode": "cme", "skipped": "state budget too small"}
        per_dim = max(int(budget ** (1.0 / d_u)) - 1, 1)
        per_dim = min(per_dim, 60)
        bounds = [per_dim] * d_u
        connected, interior = empirical_irreducibility_probe(
            net, bounds, cs, max_states=max_states
        )
        est = truncated_cme_stationary(net, bounds, cs, max_states=max_states)
        means = [est.mean(i) for i in range(net.num_species)]
        return {
            "mode": "cme",
            "box": bounds,
            "interior_strongly_connected": connected,
            "interior_size": interior,
            "stationary_means": means,
            "boundary_mass": est.boundary_mass,
            "truncation_flagged": est.truncation_flagged,
        }
    raise ValueError(f"unknown oracle mode {mode!r}")


def _levels_to_names(levels, species):
    return [sorted(species[i] for i in g) for g in levels]


def report_to_dict(report, include_timings=True):
    """JSON-ready dict; deterministic for identical inputs."""
    net = report.network
    cs = report.conserved
    irr = report.irreducibility
    rc = report.classification
    cert = report.certificate
    data = {
        "version": report.version,
        "input_sha256": report.input_sha256,
        "verdict": report.verdict,
        "network": {
            "d": net.num_species,
            "K": net.num_reactions,
            "d_u": cs.d_u if cs is not None else net.num_species,
            "d_c": cs.d_c if cs is not None else 0,
            "n_c": cs.n_c if cs is not None else 0,
            "species": list(net.species),
            "identity_reactions": [k + 1 for k in net.identity_reactions()],
        },
        "conservation": None,
        "irreducibility": None,
        "drift": None,
        "oracle": report.oracle,
        "unsupported_reason": report.unsupported_reason,
    }
    if cs is not None:
        data["conservation"] = {
            "gammas": [list(g) for g in cs.gammas],
            "totals": list(cs.totals) if cs.totals else None,
            "permutation": list(cs.permutation),
            "n_c": cs.n_c,
        }
    if irr is not None:
        data["irreducibility"] = {
            "status": irr.status,
            "failed_condition": irr.failed_condition,
            "rank": irr.rank_value,
            "rank_required": irr.rank_required,
            "lattice_ok": irr.lattice_ok,
            "hnf_pivots": list(irr.hnf_pivots),
            "flux_witness": (
                [_fr(x) for x in irr.lfp_outcome.witness]
                if irr.lfp_outcome is not None and irr.lfp_outcome.feasible
                else None
            ),
            "forward_levels": (
                _levels_to_names(irr.forward_levels.levels, net.species)
                if irr.forward_levels
                else None
            ),
            "forward_exhaustive": (
                irr.forward_levels.exhaustive if irr.forward_levels else None
            ),
            "inverse_levels": (
                _levels_to_names(irr.inverse_levels.levels, net.species)
                if irr.inverse_levels
                else None
            ),
            "inverse_exhaustive": (
                irr.inverse_levels.exhaustive if irr.inverse_levels else None
            ),
            "num_classes": (
                irr.class_analysis.num_classes if irr.class_analysis else None
            ),
            "num_closed_classes": (
                irr.class_analysis.eta if irr.class_analysis else None
            ),
            "diagnostic": irr.diagnostic,
        }
    if rc is not None:
        data["drift"] = {
            "status": report.drift_status,
            "k_unr": [k + 1 for k in rc.unary_unconserved],
            "k_bin": [k + 1 for k in rc.binary],
            "k_rem": [k + 1 for k in rc.remainder],
            "witness": [_fr(x) for x in cert.w] if cert else None,
            "lyapunov_vector": [_fr(x) for x in cert.v_positive] if cert else None,
            "alphas": [_fr(a) for a in cert.alphas] if cert else None,
            "drift_margin": [_fr(x) for x in cert.drift_margin] if cert else None,
        }
    if include_timings:
        data["timings"] = {k: round(v, 6) for k, v in report.timings.items()}
    return data


def render_report(report, fmt="human", include_timings=True):
    """Render a report (or an already-serialized dict) as text."""
    if isinstance(report, dict):
        data = dict(report)
        if not include_timings:
            data.pop("timings", None)
    else:
        data = report_to_dict(report, include_timings=include_timings)
    if fmt == "json":
        return json.dumps(data, sort_keys=True, indent=2) + "\n"
    if fmt != "human":
        raise ValueError(f"unknown format {fmt!r}")
    return _render_human(data)


def parse_report(text):
    """Inverse of the JSON rendering."""
    return json.loads(text)


def _fmt_levels(levels):
    return " ".join(
        f"G{l + 1}={{{','.join(g)}}}" for l, g in enumerate(levels)
    )


def _render_human(data):
    lines = []
    net = data["network"]
    lines.append(f"verdict: {data['verdict']}")
    lines.append(
        f"network: d={net['d']} K={net['K']} d_u={net['d_u']} "
        f"d_c={net['d_c']} n_c={net['n_c']}"
    )
    if data.get("unsupported_reason"):
        lines.append(f"unsupported: {data['unsupported_reason']}")
    cons = data.get("conservation")
    if cons:
        for g, total in zip(cons["gammas"], cons["totals"] or []):
            terms = "+".join(
                (f"{c}*{s}" if c > 1 else s)
                for c, s in zip(g, net["species"])
                if c
            )
            lines.append(f"conserved: {terms} = {total}")
    irr = data.get("irreducibility")
    if irr:
        lines.append(f"irreducibility: {irr['status']}")
        if irr["failed_condition"]:
            lines.append(
                f"  failed: {irr['failed_condition']} ({irr['diagnostic']})"
            )
        lines.append(
            f"  rank: {irr['rank']}/{irr['rank_required']}"
            f"  lattice: {'ok' if irr['lattice_ok'] else 'FAILED'}"
        )
        if irr["forward_levels"] is not None:
            lines.append("  levels: " + _fmt_levels(irr["forward_levels"]))
        if irr["inverse_levels"] is not None:
            lines.append(
                "  inverse levels: " + _fmt_levels(irr["inverse_levels"])
            )
    dr = data.get("drift")
    if dr:
        lines.append(f"drift: {dr['status']}")
        lines.append(
            "  K_unr={" + ",".join(map(str, dr["k_unr"])) + "}"
            " K_bin={" + ",".join(map(str, dr["k_bin"])) + "}"
        )
        if dr["lyapunov_vector"]:
            lines.append(
                "  lyapunov vector: (" + ", ".join(dr["lyapunov_vector"]) + ")"
            )
    if data.get("oracle"):
        lines.append(f"oracle: {json.dumps(data['oracle'], sort_keys=True)}")
    if "timings" in data:
        total = sum(data["timings"].values())
        lines.append(f"timings: total={total:.3f}s")
    return "\n".join(lines) + "\n"
