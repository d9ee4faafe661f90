from hypothesis import given

from focal import formula as F
from focal.parser import parse_formula

from strategies import positive_formula

X, Y, Z = F.Atom("X"), F.Atom("Y"), F.Atom("Z")


def test_dual_of_tensor_is_par_of_duals():
    assert F.dual_formula(F.Tensor(X, F.NotP(Y))) == F.Par(F.CoAtom("X"), F.NotN(F.CoAtom("Y")))


def test_dual_of_atom():
    assert F.dual_formula(X) == F.CoAtom("X")


def test_dual_involution_on_fixed_formula():
    P = F.Plus(X, F.Tensor(Y, Z))
    assert F.dual_formula(F.dual_formula(P)) == P


@given(positive_formula())
def test_dual_is_an_involution(P):
    N = F.dual_formula(P)
    assert F.is_negative(N)
    assert F.dual_formula(N) == P


@given(positive_formula())
def test_size_decreases_on_subformulas(P):
    assert F.size(P) >= 1
    for sub in (getattr(P, "left", None), getattr(P, "right", None), getattr(P, "body", None)):
        if sub is not None:
            assert F.size(sub) < F.size(P)


@given(positive_formula())
def test_printed_formula_reparses(P):
    assert parse_formula(F.show_formula(P)) == P


def test_polarity_classes_are_disjoint():
    assert F.is_positive(F.Tensor(X, F.NotP(Y)))
    assert not F.is_negative(F.Tensor(X, Y))
    assert F.is_lk(F.And(X, F.Neg(Y)))
    assert not F.is_positive(F.And(X, Y))


def test_ground_replaces_metas():
    u = F.Unifier()
    m = u.fresh()
    assert F.ground(F.Tensor(m, X)) == F.Tensor(F.Atom("O"), X)
