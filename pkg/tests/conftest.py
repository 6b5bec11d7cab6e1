import random
from fractions import Fraction
from pathlib import Path

import pytest

from hjcanon import kernel as K
from hjcanon.dsl import parse_model
from hjcanon.kernel import EVEN, ODD, Generator
from hjcanon.pipeline import analyze_model

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def fixture_text(name: str) -> str:
    return (FIXTURES / name).read_text()


@pytest.fixture(scope="session")
def spinning_model():
    return parse_model(fixture_text("spinning.hjc"))


@pytest.fixture(scope="session")
def spinning(spinning_model):
    return analyze_model(spinning_model)


@pytest.fixture(scope="session")
def spinless():
    return analyze_model(parse_model(fixture_text("spinless.hjc")))


@pytest.fixture(scope="session")
def free_particle():
    return analyze_model(parse_model(fixture_text("free_particle.hjc")))


def gen_of(model, name):
    """Component generator by flat name (x0, psi5, e, ...)."""
    for d in model.declarations:
        for g in d.gens + d.velocities:
            if g.name == name:
                return g
    raise KeyError(name)


def momentum_of(analysis, coord_name):
    for e in analysis.table.entries:
        if e.coordinate.name == coord_name:
            return e.momentum
    raise KeyError(coord_name)


def entry_of(analysis, coord_name):
    for e in analysis.table.entries:
        if e.coordinate.name == coord_name:
            return e
    raise KeyError(coord_name)


# -- random expressions for property testing ---------------------------------


class ToyAlgebra:
    """Small fixed generator set: two even, one invertible even, four odd."""

    def __init__(self):
        self.x = Generator("x", EVEN, "coordinate", 0)
        self.y = Generator("y", EVEN, "coordinate", 1)
        self.e = Generator("e", EVEN, "coordinate", 2)
        self.thetas = tuple(Generator(f"t{i}", ODD, "coordinate", 3 + i)
                            for i in range(4))
        self.all = (self.x, self.y, self.e) + self.thetas

    def random_monomial(self, rng: random.Random, parity=None) -> K.GradedExpr:
        coeff = K.scalar(Fraction(rng.randint(-4, 4)),
                         Fraction(rng.randint(-2, 2)))
        if coeff.is_zero():
            coeff = K.ONE
        term = coeff
        for g in (self.x, self.y):
            for _ in range(rng.randint(0, 2)):
                term = term * K.atom(g)
        odds = [g for g in self.thetas if rng.random() < 0.45]
        if parity is not None and len(odds) % 2 != parity:
            pool = [g for g in self.thetas if g not in odds]
            if pool:
                odds.append(rng.choice(pool))
            else:
                odds.pop()
        for g in odds:
            term = term * K.atom(g)
        return term

    def random_expr(self, rng: random.Random, parity=None, terms=3) -> K.GradedExpr:
        total = K.ZERO
        for _ in range(rng.randint(1, terms)):
            total = total + self.random_monomial(rng, parity)
        return total


@pytest.fixture(scope="session")
def toy():
    return ToyAlgebra()
