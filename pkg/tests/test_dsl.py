"""Model DSL: parsing, validation errors, printing roundtrip."""

import pytest

from hjcanon import kernel as K
from hjcanon.dsl import parse_model, parse_transformation, print_model
from hjcanon.errors import GradingError, ModelSyntaxError

from conftest import fixture_text, gen_of

MINI = """
model m0
parameter t
variable q : even
lagrangian: d(q)^2/2
"""


def test_parse_minimal_regular_model():
    m = parse_model(MINI)
    assert m.name == "m0"
    assert m.parameter.name == "t"
    q = gen_of(m, "q")
    dq = m.velocity_of(q)
    assert K.equals(m.lagrangian, K.atom(dq) * K.atom(dq) / K.scalar(2))


def test_component_expansion_and_metric(spinning_model):
    m = spinning_model
    assert m.metric == (1, -1, -1, -1)
    names = [d.name for d in m.declarations]
    assert names == ["tau", "m", "e", "chi", "x", "psi", "psi5"]
    x = m.lookup("x")
    assert [g.name for g in x.gens] == ["x0", "x1", "x2", "x3"]
    assert [g.name for g in x.velocities] == ["d_x0", "d_x1", "d_x2", "d_x3"]


def test_dot_applies_metric_signs(spinning_model):
    m = spinning_model
    # the pure velocity part of L carries coefficients -s_mu/(2e)
    dx1 = gen_of(m, "d_x1")
    part = K.derive_right(m.lagrangian, dx1)
    chi, psi1, e = (gen_of(m, n) for n in ("chi", "psi1", "e"))
    expected = (K.atom(dx1) - K.I * K.atom(chi) * K.atom(psi1)) / K.atom(e)
    assert K.equals(part, expected)


def test_undeclared_identifier_is_an_error():
    with pytest.raises(ModelSyntaxError, match="undeclared identifier 'z'"):
        parse_model("model m\nparameter t\nvariable q : even\nlagrangian: d(q)*z")


def test_syntax_error_carries_position():
    with pytest.raises(ModelSyntaxError) as err:
        parse_model("model m\nparameter t\nvariable q : even\nlagrangian: d(q) +")
    assert err.value.line == 4


def test_odd_denominator_rejected():
    text = """
model m
parameter t
variable q : even
variable th : odd
lagrangian: d(q)/th
"""
    with pytest.raises(ModelSyntaxError, match="odd"):
        parse_model(text)


def test_odd_overall_parity_rejected():
    text = """
model m
parameter t
variable q : even
variable th : odd
lagrangian: d(q)*th
"""
    with pytest.raises(GradingError):
        parse_model(text)


def test_two_parameters_rejected():
    with pytest.raises(ModelSyntaxError):
        parse_model("model m\nparameter t\nparameter s\n"
                    "variable q : even\nlagrangian: d(q)^2")


def test_duplicate_declaration_rejected():
    with pytest.raises(ModelSyntaxError, match="duplicate"):
        parse_model("model m\nparameter t\nvariable q : even\n"
                    "variable q : odd\nlagrangian: d(q)^2")


def test_family_requires_index_outside_dot(spinning_model):
    text = fixture_text("spinning.hjc").replace("psi5*d(psi5)", "psi*d(psi5)")
    with pytest.raises(ModelSyntaxError, match="needs an index"):
        parse_model(text)


def test_indexed_atom_allowed():
    text = """
model m
parameter t
metric (+ - - -)
variable x[4] : even
lagrangian: d(x[0])^2 - x[1]*x[2]
"""
    m = parse_model(text)
    x1, x2 = gen_of(m, "x1"), gen_of(m, "x2")
    dx0 = gen_of(m, "d_x0")
    expected = K.atom(dx0) ** 2 - K.atom(x1) * K.atom(x2)
    assert K.equals(m.lagrangian, expected)


def test_side_condition_recorded(spinning_model):
    assert len(spinning_model.side_conditions) == 1
    e = gen_of(spinning_model, "e")
    assert K.equals(spinning_model.side_conditions[0], K.atom(e))


class TestRoundtrip:
    def test_spinning_roundtrip(self, spinning_model):
        printed = print_model(spinning_model)
        again = parse_model(printed)
        assert K.equals(spinning_model.lagrangian, again.lagrangian)
        assert [d.name for d in spinning_model.declarations] == \
            [d.name for d in again.declarations]
        assert again.metric == spinning_model.metric
        assert parse_model(print_model(again)).lagrangian == again.lagrangian

    def test_minimal_roundtrip(self):
        m = parse_model(MINI)
        again = parse_model(print_model(m))
        assert K.equals(m.lagrangian, again.lagrangian)


class TestTransformations:
    def test_reparametrization_parses(self, spinning_model):
        tr = parse_transformation(fixture_text("reparametrization.hjt"),
                                  spinning_model)
        assert tr.param.name == "zeta"
        assert len(tr.variations) == 11  # e, chi, 4 x, 4 psi, psi5
        e = gen_of(spinning_model, "e")
        de = spinning_model.velocity_of(e)
        expected = K.atom(de) * K.atom(tr.param) + K.atom(e) * K.atom(tr.param_velocity)
        assert K.equals(tr.variations[e], expected)

    def test_variation_parity_enforced(self, spinning_model):
        bad = "transformation t\nparam eps : odd\nvary e : eps"
        with pytest.raises(GradingError):
            parse_transformation(bad, spinning_model)

    def test_unknown_vary_target(self, spinning_model):
        bad = "transformation t\nparam z : even\nvary nope : z"
        with pytest.raises(ModelSyntaxError):
            parse_transformation(bad, spinning_model)
