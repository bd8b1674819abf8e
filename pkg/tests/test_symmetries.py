import pytest

from kvnlab.errors import UnsupportedInputError
from kvnlab.model import corpus
from kvnlab.poly import Poly, variables
from kvnlab.superfield import build_superfield, evaluate_on_superfield, omega_contract
from kvnlab.superops import OperatorSum, charges
from kvnlab.superspace import Fields
from kvnlab.symmetries import (
    KINDS,
    LocalTransformation,
    SuperOperatorExpression,
    check_generators,
    check_local_symmetries,
    check_picture_change,
    classify_observable,
    evaluate_operator,
    is_invariant,
    local_transform,
    operator_superfield,
    picture_change,
    picture_generator,
    schrodinger_state,
    transform_residual,
    zero_form_project,
)

HO = corpus()["harmonic"]


@pytest.fixture
def f():
    return Fields(1)


def test_transformation_images(f):
    T1 = LocalTransformation("T1", HO)
    T3 = LocalTransformation("T3", HO)
    assert local_transform(f.phi(0), T1) == f.phi(0) + f.eps * f.theta * f.c(0)
    assert local_transform(f.c(0), T1) == f.c(0) - f.eps * f.c(0)
    # lam_b -> lam_b - eps omega_{bc} phi^c; omega_{qp} = -1
    assert local_transform(f.lam(0), T3) == f.lam(0) + f.eps * f.phi(1)


def test_prolongation_produces_eps_dot(f):
    T1 = LocalTransformation("T1", HO)
    r = transform_residual(f.phi(0, 1), T1)
    assert r == f.eps_dot * f.theta * f.c(0) + f.eps * f.theta * f.c(0, 1)


def test_unknown_kind_rejected():
    with pytest.raises(Exception):
        LocalTransformation("T4", HO)


@pytest.mark.parametrize("name", sorted(corpus()))
def test_local_symmetry_report(name):
    report = check_local_symmetries(corpus()[name])
    assert report.passed, report.failures()


def test_superfield_invariant_under_all_three(f):
    Phi = build_superfield(HO, f)
    for a in range(2):
        assert is_invariant(Phi[a], KINDS, HO, include_dot=True)


def test_sub_pieces_are_exclusive(f):
    piece1 = f.phi(0) + f.theta * f.c(0)
    piece2 = f.phi(0) + f.thetabar * omega_contract(HO, 0, f.cbar)
    assert is_invariant(piece1, {"T1"}, HO)
    assert not is_invariant(piece1, {"T2"}, HO)
    assert not is_invariant(piece1, {"T3"}, HO)
    assert is_invariant(piece2, {"T2"}, HO)
    assert not is_invariant(piece2, {"T1"}, HO)
    assert not is_invariant(f.phi(0), {"T1"}, HO)


def test_classifier_verdicts(f):
    q, p = variables(1)
    G = evaluate_on_superfield(q * q + p, build_superfield(HO, f))
    assert classify_observable(G, HO).accepted
    lam_v = classify_observable(f.lam(0), HO)
    assert (lam_v.accepted, lam_v.failing) == (False, "T3")
    phi_v = classify_observable(f.phi(0), HO)
    assert (phi_v.accepted, phi_v.failing) == (False, "T1")
    assert str(phi_v.residual) == "eps*theta*c_q_1"
    mixed = classify_observable(f.phi(0) * f.lam(0), HO)
    assert not mixed.accepted and mixed.failing == "T1"


def test_classifier_reduced_part(f):
    q, p = variables(1)
    G = evaluate_on_superfield(q * q + p, build_superfield(HO, f))
    assert classify_observable(G, HO).reduced == f.phi(0) * f.phi(0) + f.phi(1)


def test_accepted_observables_picture_change_to_functions_of_phi(f):
    q, p = variables(1)
    for G in (q * q + p, HO.H, q * p * p):
        assert classify_observable(evaluate_on_superfield(G, build_superfield(HO, f)), HO).accepted
        assert check_picture_change(G, HO).passed


def test_operator_superfield_components():
    Phi = operator_superfield(HO)
    assert Phi[0].blades[0] == OperatorSum.phi(2, 0)
    assert Phi[0].blades[1] == OperatorSum.c(2, 0)
    assert Phi[0].blades[2] == OperatorSum.cbar(2, 1)


def test_picture_generator_is_nilpotent_cube():
    X = picture_generator(HO)
    assert not (X * X).is_zero()
    assert (X * X * X).is_zero()


def test_picture_change_examples():
    Phi = operator_superfield(HO)
    assert picture_change(Phi[0], HO) == SuperOperatorExpression.op(OperatorSum.phi(2, 0))
    ident = SuperOperatorExpression.identity(2)
    assert picture_change(ident, HO) == ident
    sq = picture_change(Phi[0] * Phi[0], HO)
    assert sq == SuperOperatorExpression.op(OperatorSum.phi(2, 0) ** 2)


def test_picture_change_brute_force_square():
    # expand (Phi^q)^2 blade by blade and conjugate each term separately
    Phi = operator_superfield(HO)[0]
    total = SuperOperatorExpression(2)
    for m1, o1 in Phi.blades.items():
        for m2, o2 in Phi.blades.items():
            x = SuperOperatorExpression(2, {m1: o1}) * SuperOperatorExpression(2, {m2: o2})
            total = total + picture_change(x, HO)
    assert total == SuperOperatorExpression.op(OperatorSum.phi(2, 0) ** 2)


@pytest.mark.parametrize("name", sorted(corpus()))
def test_picture_change_theorem(name):
    m = corpus()[name]
    gens = [Poly.var(m.dim, a) for a in range(m.dim)] + [Poly.var(m.dim, 0) ** 2, m.H]
    for G in gens:
        assert check_picture_change(G, m).passed


@pytest.mark.parametrize("name", sorted(corpus()))
def test_generator_property(name):
    assert check_generators(corpus()[name]).passed


def test_generator_sign_of_antibrs():
    # [Qbar, phi^q] carries the opposite sign to the theta-bar component
    Q = charges(HO)
    lhs = Q.Qbar_BRS * OperatorSum.phi(2, 0) - OperatorSum.phi(2, 0) * Q.Qbar_BRS
    assert lhs == -OperatorSum.cbar(2, 1)


def test_evaluate_operator_matches_products():
    Phi = operator_superfield(HO)
    q, p = variables(1)
    assert evaluate_operator(q * p, Phi) == Phi[0] * Phi[1]


def test_schrodinger_state_examples(f):
    assert schrodinger_state(f.const(1), HO) == f.const(1)
    q = f.phi(0)
    th, tb = f.theta, f.thetabar
    shift = th * f.c(0) + tb * f.cbar(1)
    assert schrodinger_state(q, HO) == q + shift
    assert schrodinger_state(q * q, HO) == q * q + q * shift * 2 + th * f.c(0) * tb * f.cbar(1) * 2


def test_schrodinger_state_rejects_lam(f):
    with pytest.raises(UnsupportedInputError):
        schrodinger_state(f.lam(0), HO)


def test_zero_form_projection(f):
    g = f.phi(0) ** 2 + f.phi(1)
    assert zero_form_project(g) == (g, True)
    z = zero_form_project(f.c(0) * g)
    assert z.zero_form.is_zero() and not z.is_pure
    z = zero_form_project(g + f.c(0) * g)
    assert z.zero_form == g and not z.is_pure
