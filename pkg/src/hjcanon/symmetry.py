"""First-order Lagrangian variations and the total-derivative decision rule.

An expression is a total parameter-derivative exactly when the Euler-Lagrange
operator annihilates it for every dynamical symbol (including the
transformation parameter, which is an arbitrary function). All derivatives
are right derivatives; the parameter derivative of a product then satisfies
the usual Leibniz rule with the factor order preserved.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import kernel as K
from .dsl import Model, Transformation
from .errors import GradingError, UnsupportedModelError
from .kernel import Generator, GradedExpr

MAX_INPUT_ORDER = 2  # velocities and accelerations in caller expressions
_MAX_CHAIN = 4  # internal: EL of an order-2 input needs derivatives to order 4


class DerivativeContext:
    """Derivative chains (velocity, acceleration, ...) for a model plus an
    optional transformation parameter."""

    def __init__(self, model: Model, transformation: Transformation | None = None):
        self.model = model
        self.transformation = transformation
        self.next_gen: dict = {}
        self.bases: list = []

        ordinal = max(g.ordinal for d in model.declarations
                      for g in d.gens + d.velocities) + 1
        if transformation is not None:
            ordinal = max(ordinal, transformation.param_velocity.ordinal + 1)

        chains = []
        for d in model.declarations:
            if d.role != "variable":
                continue
            for g, v in zip(d.gens, d.velocities):
                chains.append((g, v))
        if transformation is not None:
            chains.append((transformation.param, transformation.param_velocity))

        for base, vel in chains:
            self.bases.append(base)
            self.next_gen[base] = vel
            prev = vel
            for order in range(2, _MAX_CHAIN + 1):
                g = Generator(name="d" * order + f"_{base.name}", parity=base.parity,
                              kind="velocity", ordinal=ordinal, component=base.component,
                              base=base.base, linked=base.ordinal, order=order)
                ordinal += 1
                self.next_gen[prev] = g
                prev = g

    def derivative_chain(self, base: Generator):
        out = [base]
        g = self.next_gen.get(base)
        while g is not None:
            out.append(g)
            g = self.next_gen.get(g)
        return out

    def dtau(self, expr: GradedExpr) -> GradedExpr:
        """Total parameter derivative via the chain rule."""
        total = K.ZERO
        for g in sorted(expr.generators(), key=lambda g: g.ordinal):
            if g.kind == "constant":
                continue
            if g.kind == "parameter" and g == self.model.parameter:
                continue
            nxt = self.next_gen.get(g)
            if nxt is None:
                if g.kind in ("velocity",):
                    raise UnsupportedModelError(
                        f"derivative order above {_MAX_CHAIN} required for {g.name}")
                if g.kind == "parameter":
                    raise UnsupportedModelError(
                        f"parameter {g.name} has no derivative chain")
                raise UnsupportedModelError(f"cannot differentiate {g.name}")
            c = K.derive_right(expr, g)
            if not c.is_zero():
                total = total + c * K.atom(nxt)
        return total


def _input_order(expr: GradedExpr) -> int:
    worst = 0
    for g in expr.generators():
        if g.kind == "velocity":
            worst = max(worst, g.order)
    return worst


def vary_lagrangian(model: Model, transformation: Transformation) -> GradedExpr:
    """First-order variation of L with d(delta q)/d tau expanded."""
    ctx = DerivativeContext(model, transformation)
    total = K.ZERO
    for d in model.declarations:
        if d.role != "variable":
            continue
        for g, v in zip(d.gens, d.velocities):
            delta = transformation.variations.get(g, K.ZERO)
            if delta.is_zero():
                continue
            a = K.derive_right(model.lagrangian, g)
            if not a.is_zero():
                total = total + a * delta
            b = K.derive_right(model.lagrangian, v)
            if not b.is_zero():
                total = total + b * ctx.dtau(delta)
    return total


@dataclass
class TotalDerivativeReport:
    is_total_derivative: bool
    residuals: dict  # variable Generator -> nonvanishing EL component


def euler_lagrange(expr: GradedExpr, ctx: DerivativeContext,
                   variable: Generator) -> GradedExpr:
    """EL_q = d/dq - d/dtau (d/d q') + d^2/dtau^2 (d/d q'')."""
    chain = ctx.derivative_chain(variable)[: MAX_INPUT_ORDER + 1]
    total = K.ZERO
    sign = 1
    for k, g in enumerate(chain):
        piece = K.derive_right(expr, g)
        for _ in range(k):
            piece = ctx.dtau(piece)
        total = total + (piece if sign > 0 else -piece)
        sign = -sign
    return total


def is_total_derivative(expr: GradedExpr, model: Model,
                        transformation: Transformation | None = None
                        ) -> TotalDerivativeReport:
    """True iff the Euler-Lagrange operator annihilates expr for every
    dynamical variable (standard variational lemma)."""
    if _input_order(expr) > MAX_INPUT_ORDER:
        raise UnsupportedModelError("expressions above second derivatives unsupported")
    ctx = DerivativeContext(model, transformation)
    residuals = {}
    for base in ctx.bases:
        el = euler_lagrange(expr, ctx, base)
        if not el.is_zero():
            residuals[base] = el
    return TotalDerivativeReport(not residuals, residuals)
