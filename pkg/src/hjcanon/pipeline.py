"""End-to-end analysis driver: model text in, Analysis out."""

from __future__ import annotations

from dataclasses import dataclass, field

from . import kernel as K
from .brackets import BracketTable, classify
from .dsl import Model, parse_model
from .engine import (ClosureLedger, TotalDifferentialSystem, action_integrand,
                     build_tdes, closure, recover_action)
from .legendre import (HamiltonianSet, MomentumTable, build_hjpde, canonical_h0,
                       compute_momenta)
from .printer import expr_str, oneform_str
from .reference import REFERENCE


@dataclass
class Analysis:
    model: Model
    table: MomentumTable
    h0: K.GradedExpr
    hs: HamiltonianSet
    tdes: TotalDifferentialSystem
    ledger: ClosureLedger
    brackets: BracketTable
    integrand: dict
    recovered: bool
    recover_residual: dict
    checks: dict = field(default_factory=dict)

    def constraints(self):
        """Primary constraints plus every secondary from the closure."""
        return [(m.name, m.expr) for m in self.hs.constraint_members()] + \
            self.ledger.secondary


def _leg_name(g):
    return g.name


def _reference_checks(analysis: Analysis) -> dict:
    ref = REFERENCE.get(analysis.model.name)
    if ref is None:
        return {}
    checks = {}
    momenta_str = {e.momentum.name: expr_str(e.defining)
                   for e in analysis.table.entries}
    for name, want in ref.get("momenta", {}).items():
        checks[f"reference:momenta:{name}"] = momenta_str.get(name) == want
    vel_str = {e.velocity.name: expr_str(e.w)
               for e in analysis.table.entries if e.solvable}
    for name, want in ref.get("velocities", {}).items():
        checks[f"reference:velocities:{name}"] = vel_str.get(name) == want
    if "h0" in ref:
        checks["reference:h0"] = expr_str(analysis.h0) == ref["h0"]
    tdes_str = {g.name: oneform_str(f, _leg_name)
                for g, f in analysis.tdes.oneforms.items()}
    for name, want in ref.get("tdes", {}).items():
        checks[f"reference:tdes:{name}"] = tdes_str.get(name) == want
    secondary_str = {n: expr_str(e) for n, e in analysis.ledger.secondary}
    for name, want in ref.get("secondary_constraints", {}).items():
        checks[f"reference:secondary:{name}"] = secondary_str.get(name) == want
    det_str = {g.name: oneform_str(f, _leg_name)
               for g, f in analysis.ledger.determined.items()}
    for name, want in ref.get("determined_differentials", {}).items():
        checks[f"reference:determined:{name}"] = det_str.get(name) == want
    return checks


def analyze_model(model: Model) -> Analysis:
    table = compute_momenta(model)
    h0 = canonical_h0(model, table)
    hs = build_hjpde(model, table, h0)
    tdes = build_tdes(model, table, hs)
    ledger = closure(hs, tdes)
    constraints = [(m.name, m.expr) for m in hs.constraint_members()] + ledger.secondary
    brackets = classify(constraints, table)
    integrand = action_integrand(tdes, ledger)
    recovered, residual = recover_action(model, table, tdes, ledger)

    analysis = Analysis(model, table, h0, hs, tdes, ledger, brackets,
                        integrand, recovered, residual)
    checks = {
        "h0_velocity_free": not any(g.kind == "velocity" for g in h0.generators()),
        "momenta_resubstitution": True,  # asserted during compute_momenta
        "closure_verified": ledger.status == "closed",
        "tau_momentum_rate_zero": not tdes.oneforms[hs.tau_momentum],
        "action_recovered": recovered,
    }
    checks.update(_reference_checks(analysis))
    analysis.checks = checks
    return analysis


def analyze_file(path: str) -> Analysis:
    with open(path, "r", encoding="utf-8") as fh:
        return analyze_model(parse_model(fh.read()))
