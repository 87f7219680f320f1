from fractions import Fraction

import pytest

from cfrealize import (
    AnalyticModel,
    BilinearModel,
    MonomialBudgetError,
    MultiPoly,
    ParseError,
    PolyVectorField,
    Series,
    bilinear_coefficients,
    cf_coefficients,
    coefficient,
    lie_derivative,
    linear_embedding,
    parse_model,
    parse_polynomial,
    poly_eval,
    stratonovich_to_ito_drift,
    words_up_to,
)
from cfrealize.symdiff import format_model, poly_to_string
from conftest import rand_bilinear, rand_poly


def P(text, n):
    return parse_polynomial(text, n)


class TestPolyBasics:
    def test_eval_coordinate(self):
        assert poly_eval(P("x1", 2), (3, 5)) == 3

    def test_eval_mixed(self):
        assert poly_eval(P("x1^2*x2 - 1", 2), (2, 3)) == 11

    def test_eval_zero_poly(self):
        assert poly_eval(MultiPoly.zero(3), (1, 2, 3)) == 0

    def test_eval_float_mode(self):
        assert poly_eval(P("x1^2", 1), (0.5,)) == pytest.approx(0.25)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            poly_eval(P("x1", 2), (1,))

    def test_partial(self):
        assert P("x1^2*x2", 2).partial(1) == P("2*x1*x2", 2)
        assert P("x1^2*x2", 2).partial(2) == P("x1^2", 2)


class TestLieDerivative:
    def test_constant_field_linear_readout(self):
        g = PolyVectorField((P("1", 2), P("0", 2)))
        assert lie_derivative(g, P("x1", 2)) == P("1", 2)

    def test_rotation_preserves_radius(self):
        g = PolyVectorField((P("x2", 2), P("-x1", 2)))
        assert lie_derivative(g, P("x1^2 + x2^2", 2)).is_zero()

    def test_symbolic_example(self):
        g = PolyVectorField((P("x1*x2", 2), P("x2", 2)))
        assert lie_derivative(g, P("x1", 2)) == P("x1*x2", 2)

    def test_leibniz_rule(self, rng):
        for _ in range(100):
            n = rng.randint(1, 3)
            g = PolyVectorField(tuple(rand_poly(rng, n, 2) for _ in range(n)))
            phi = rand_poly(rng, n, 4)
            psi = rand_poly(rng, n, 4)
            lhs = lie_derivative(g, phi * psi)
            rhs = phi * lie_derivative(g, psi) + psi * lie_derivative(g, phi)
            assert lhs == rhs


def drift_model():
    return parse_model("n = 1\nm = 1\nx0 = 0\ng0 = 1\ng1 = 0\nh = x1\n")


class TestCoefficients:
    def test_pure_drift(self):
        s = cf_coefficients(drift_model(), 2)
        assert s.coeffs == {(0,): 1}

    def test_pure_diffusion_square(self):
        model = parse_model("n = 1\nm = 1\nx0 = 0\ng0 = 0\ng1 = 1\nh = x1^2\n")
        s = cf_coefficients(model, 2)
        assert s.coeffs == {(1, 1): 2}

    def test_rotation_model(self):
        model = parse_model("n = 2\nm = 1\nx0 = 1, 0\ng0 = x2, -x1\ng1 = 0, 0\nh = x1\n")
        s = cf_coefficients(model, 2)
        assert coefficient(s, (0,)) == 0
        assert coefficient(s, (0, 0)) == -1
        assert coefficient(s, ()) == 1

    def test_linearity_in_readout(self, rng):
        n = 2
        fields = tuple(
            PolyVectorField(tuple(rand_poly(rng, n, 2) for _ in range(n))) for _ in range(2)
        )
        h1, h2 = rand_poly(rng, n, 2), rand_poly(rng, n, 2)
        x0 = (Fraction(1), Fraction(-1))
        s1 = cf_coefficients(AnalyticModel(n, 1, x0, fields, h1), 4)
        s2 = cf_coefficients(AnalyticModel(n, 1, x0, fields, h2), 4)
        s12 = cf_coefficients(AnalyticModel(n, 1, x0, fields, h1 + h2), 4)
        for w in words_up_to(1, 4):
            assert coefficient(s12, w) == coefficient(s1, w) + coefficient(s2, w)

    def test_monomial_budget_guard(self):
        model = parse_model(
            "n = 1\nm = 1\nx0 = 0\ng0 = x1^2\ng1 = x1^3\nh = x1^4\n"
        )
        with pytest.raises(MonomialBudgetError):
            cf_coefficients(model, 6, term_budget=10)


class TestBilinearCoefficients:
    def test_scalar_model_counts_letters(self, rng):
        a, b = Fraction(3, 2), Fraction(-2)
        model = BilinearModel(1, 1, (Fraction(1),), (((a,),), ((b,),)), (Fraction(1),))
        s = bilinear_coefficients(model, 5)
        for w in words_up_to(1, 5):
            zeros = sum(1 for c in w if c == 0)
            ones = len(w) - zeros
            assert coefficient(s, w) == a**zeros * b**ones

    def test_zero_readout(self, rng):
        model = rand_bilinear(rng, 3, 2)
        model = BilinearModel(3, 2, model.x0, model.mats, (Fraction(0),) * 3)
        assert bilinear_coefficients(model, 4).is_zero()

    def test_identity_matrices(self):
        eye = tuple(
            tuple(Fraction(int(i == j)) for j in range(2)) for i in range(2)
        )
        model = BilinearModel(2, 1, (Fraction(5), Fraction(7)), (eye, eye), (Fraction(1), Fraction(0)))
        s = bilinear_coefficients(model, 3)
        for w in words_up_to(1, 3):
            assert coefficient(s, w) == 5

    def test_matches_linear_embedding_to_degree_five(self, rng):
        for _ in range(4):
            model = rand_bilinear(rng, rng.randint(1, 3), rng.randint(1, 2))
            direct = bilinear_coefficients(model, 5)
            via_fields = cf_coefficients(linear_embedding(model), 5)
            assert direct == via_fields

    def test_commuting_fields_give_symmetric_coefficients(self):
        # A0 = diag(1,2), A1 = diag(3,-1) commute, so coefficients depend only
        # on the letter multiset.
        a0 = ((Fraction(1), Fraction(0)), (Fraction(0), Fraction(2)))
        a1 = ((Fraction(3), Fraction(0)), (Fraction(0), Fraction(-1)))
        model = BilinearModel(2, 1, (Fraction(1), Fraction(1)), (a0, a1), (Fraction(1), Fraction(1)))
        s = bilinear_coefficients(model, 4)
        import itertools

        for w in words_up_to(1, 4):
            for perm in itertools.permutations(w):
                assert coefficient(s, tuple(perm)) == coefficient(s, w)


class TestDriftConversion:
    def test_constant_fields_unchanged(self):
        model = parse_model("n = 2\nm = 2\nx0 = 0, 0\ng0 = 1, 2\ng1 = 3, 4\ng2 = -1, 0\nh = x1\n")
        q = [[1, 0], [0, 1]]
        b = stratonovich_to_ito_drift(model, q)
        assert b.components == model.fields[0].components

    def test_scalar_multiplicative_noise(self):
        model = parse_model("n = 1\nm = 1\nx0 = 0\ng0 = 0\ng1 = x1\nh = x1\n")
        b = stratonovich_to_ito_drift(model, [[1]])
        assert b.components[0] == P("1/2*x1", 1)

    def test_covariance_scaling(self):
        model = parse_model("n = 1\nm = 1\nx0 = 0\ng0 = 0\ng1 = x1\nh = x1\n")
        b = stratonovich_to_ito_drift(model, [[4]])
        assert b.components[0] == P("2*x1", 1)

    def test_rejects_non_spd(self):
        model = parse_model("n = 1\nm = 1\nx0 = 0\ng0 = 0\ng1 = x1\nh = x1\n")
        with pytest.raises(ValueError):
            stratonovich_to_ito_drift(model, [[-1]])
        model2 = parse_model("n = 1\nm = 2\nx0 = 0\ng0 = 0\ng1 = x1\ng2 = 1\nh = x1\n")
        with pytest.raises(ValueError):
            stratonovich_to_ito_drift(model2, [[1, 2], [2, 1]])


class TestPolynomialParser:
    def test_precedence_and_round_trip(self):
        p = P("-x1^2*x2 + 3/4*x1 - (x2 - 1)^2", 2)
        assert parse_polynomial(poly_to_string(p), 2) == p

    def test_unary_minus_binds_power(self):
        assert P("-x1^2", 1) == -P("x1^2", 1)

    def test_rational_literal(self):
        assert poly_eval(P("3/4", 1), (0,)) == Fraction(3, 4)

    def test_error_names_token(self):
        with pytest.raises(ParseError) as err:
            P("x1 + 2y", 1)
        assert "y" in str(err.value)

    def test_error_on_out_of_range_variable(self):
        with pytest.raises(ParseError) as err:
            P("x3", 2)
        assert "x3" in str(err.value)

    def test_error_on_fractional_exponent(self):
        with pytest.raises(ParseError):
            P("x1^1/2", 1)


class TestModelFiles:
    def test_analytic_round_trip(self):
        model = parse_model(
            "# a rotation\nn = 2\nm = 1\nx0 = 1, 0\ng0 = x2, -x1\ng1 = 0, 0\nh = x1\n"
        )
        text = format_model(model)
        assert parse_model(text) == model
        assert format_model(parse_model(text)) == text

    def test_bilinear_round_trip(self, rng):
        model = rand_bilinear(rng, 3, 2)
        assert parse_model(format_model(model)) == model

    def test_missing_key(self):
        with pytest.raises(ParseError):
            parse_model("n = 1\nm = 1\nx0 = 0\ng0 = 1\nh = x1\n")

    def test_unknown_key(self):
        with pytest.raises(ParseError):
            parse_model("n = 1\nm = 1\nx0 = 0\ng0 = 1\ng1 = 0\nh = x1\nzz = 3\n")

    def test_wrong_matrix_size(self):
        with pytest.raises(ParseError):
            parse_model("n = 2\nm = 1\nx0 = 0, 0\nA0 = 1, 0\nA1 = 0, 0, 0, 0\nC = 1, 0\n")

    def test_type_mismatch(self):
        with pytest.raises(ParseError):
            parse_model("type = bilinear\nn = 1\nm = 1\nx0 = 0\ng0 = 1\ng1 = 0\nh = x1\n")
