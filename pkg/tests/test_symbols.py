import cmath
import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from blochlab.acceptance import fd_derivative, interior_points, node_battery
from blochlab.errors import DomainError, SpecParseError
from blochlab.symbols import (
    MAX_DEPTH,
    Blaschke,
    Compose,
    Constant,
    Dilate,
    Identity,
    Mobius,
    Poly,
    Power,
    Rotate,
    derivative,
    evaluate,
    parse_symbol_spec,
    power_deriv,
    validate_self_map,
)

Z = interior_points()

disk_points = st.builds(
    lambda r, a: r * cmath.exp(1j * a),
    st.floats(0.0, 0.95),
    st.floats(0.0, 2 * math.pi),
)
small_params = st.builds(
    lambda r, a: r * cmath.exp(1j * a),
    st.floats(0.0, 0.9),
    st.floats(0.0, 2 * math.pi),
)


class TestParse:
    def test_examples(self):
        assert parse_symbol_spec("id") == Identity()
        assert parse_symbol_spec("dilate:0.5") == Dilate(0.5)
        assert parse_symbol_spec("compose(power:2,mobius:0.3,0.0)") == Compose(Power(2), Mobius(0.3))

    def test_compose_means_outer_of_inner(self):
        phi = parse_symbol_spec("compose(power:2,mobius:0.3,0.0)")
        z = np.array([0.1 + 0.2j])
        assert phi(z)[0] == pytest.approx(((0.3 - z[0]) / (1 - 0.3 * z[0])) ** 2, rel=1e-15)

    @pytest.mark.parametrize("text", [
        "const:0.1,-0.2", "dilate:0.3,0.4", "rotate:1.25", "mobius:-0.5,0.25", "power:7",
        "poly:0.1,0.2+0.1j,-0.3", "blaschke:0.5,0.0;-0.2,0.3",
        "compose(compose(rotate:0.5,dilate:0.9),blaschke:0.1,0.1;0.0,0.0)",
    ])
    def test_spec_round_trip(self, text):
        phi = parse_symbol_spec(text)
        assert parse_symbol_spec(phi.spec) == phi

    def test_battery_round_trip(self):
        for phi in node_battery():
            assert parse_symbol_spec(phi.spec) == phi

    @pytest.mark.parametrize("bad", [
        "", "ident", "dilate", "dilate:", "dilate:1,2,3", "mobius:0.3", "power:2.5",
        "compose(id)", "compose(id,id", "id id", "blaschke:", "const:0.1", "poly:a", "dilate:0.5#",
    ])
    def test_malformed(self, bad):
        with pytest.raises(SpecParseError):
            parse_symbol_spec(bad)

    def test_error_position(self):
        with pytest.raises(SpecParseError) as info:
            parse_symbol_spec("compose(id,foo:1)")
        assert info.value.position == 11

    @pytest.mark.parametrize("bad", ["const:1.0,0.0", "mobius:1.0,0.0", "dilate:1.5",
                                     "blaschke:0.5,0.0;1.0,0.0"])
    def test_out_of_domain_parameters(self, bad):
        with pytest.raises(DomainError):
            parse_symbol_spec(bad)

    def test_depth_cap(self):
        text = "id"
        for _ in range(MAX_DEPTH + 1):
            text = f"compose(rotate:0.1,{text})"
        with pytest.raises((SpecParseError, DomainError)):
            parse_symbol_spec(text)

    def test_json(self):
        d = json.loads(Compose(Power(2), Mobius(0.3j)).to_json())
        assert isinstance(d, dict)


class TestEvaluate:
    def test_identity(self):
        assert np.array_equal(Identity().value(Z), Z)
        assert np.all(Identity().deriv(Z) == 1)

    @pytest.mark.parametrize("a", [0.3, 0.5 - 0.4j, -0.9j])
    def test_mobius_identities(self, a):
        m = Mobius(a)
        assert abs(evaluate(m, a)) < 1e-15
        assert evaluate(m, 0) == pytest.approx(a, abs=1e-15)
        assert np.max(np.abs(m.value(m.value(Z)) - Z)) <= 1e-12

    @pytest.mark.parametrize("phi", node_battery(), ids=lambda p: p.spec)
    def test_derivative_vs_central_difference(self, phi):
        exact = phi.deriv(Z)
        fd = fd_derivative(phi, Z)
        nz = np.abs(exact) > 0
        assert np.all(np.abs(fd - exact)[nz] <= 1e-6 * np.abs(exact)[nz])
        assert np.all(np.abs(fd[~nz]) <= 1e-9)

    def test_domain_checks(self):
        for fn in (evaluate, derivative):
            with pytest.raises(DomainError):
                fn(Identity(), 1.0)
        with pytest.raises(DomainError):
            power_deriv(Identity(), 3, np.array([0.2, 1.2]))

    def test_blaschke_zeros(self):
        b = Blaschke((0.5, -0.3 + 0.4j))
        assert abs(evaluate(b, 0.5)) < 1e-15 and abs(evaluate(b, -0.3 + 0.4j)) < 1e-15
        with pytest.raises(DomainError):
            Blaschke(())

    def test_blaschke_unimodular_on_circle(self):
        b = Blaschke((0.5, -0.3 + 0.4j, 0.0))
        circle = np.exp(1j * np.linspace(0, 2 * math.pi, 64))
        assert np.allclose(np.abs(b.value(circle)), 1.0, atol=1e-14)

    def test_poly_horner(self):
        p = Poly((0.1, 0.3 + 0.1j, -0.2))
        z = 0.3 - 0.1j
        assert evaluate(p, z) == pytest.approx(0.1 + (0.3 + 0.1j) * z - 0.2 * z * z, abs=1e-16)
        assert derivative(p, z) == pytest.approx((0.3 + 0.1j) - 0.4 * z, abs=1e-16)


class TestPowerDeriv:
    def test_identity(self):
        z = 0.4 + 0.3j
        assert power_deriv(Identity(), 7, z) == pytest.approx(7 * z**6, rel=1e-14)

    def test_dilate(self):
        a, z = 0.6 - 0.2j, -0.3 + 0.5j
        assert power_deriv(Dilate(a), 5, z) == pytest.approx(5 * a**5 * z**4, rel=1e-13)

    @pytest.mark.parametrize("phi", node_battery(), ids=lambda p: p.spec)
    @pytest.mark.parametrize("j", [1, 2, 9])
    def test_vs_finite_difference(self, phi, j):
        h = 1e-6
        zs = Z[:25] * 0.95

        def fj(z):
            return phi.value(z) ** j

        fd = (fj(zs + h) - fj(zs - h)) / (2 * h)
        exact = power_deriv(phi, j, zs)
        nz = np.abs(exact) > 1e-12
        assert np.all(np.abs(np.abs(fd[nz]) - np.abs(exact[nz])) <= 1e-5 * np.abs(exact[nz]))

    def test_zero_base(self):
        assert power_deriv(Identity(), 3, 0.0) == 0


class TestProperties:
    @settings(max_examples=60, deadline=None)
    @given(a=small_params, z=disk_points)
    def test_mobius_involution(self, a, z):
        m = Mobius(a)
        assert abs(evaluate(m, evaluate(m, z)) - z) <= 1e-12

    @settings(max_examples=60, deadline=None)
    @given(a=small_params, b=small_params, z=disk_points)
    def test_chain_rule(self, a, b, z):
        f, g = Blaschke((a,)), Dilate(b)
        comp = Compose(f, g)
        want = derivative(f, evaluate(g, z)) * derivative(g, z)
        assert derivative(comp, z) == pytest.approx(want, rel=1e-13, abs=1e-15)

    @settings(max_examples=60, deadline=None)
    @given(angle=st.floats(-10, 10), z=disk_points)
    def test_rotation_keeps_modulus(self, angle, z):
        phi = Mobius(0.4 + 0.2j)
        assert abs(evaluate(Compose(Rotate(angle), phi), z)) == pytest.approx(abs(evaluate(phi, z)), rel=1e-14)

    @settings(max_examples=40, deadline=None)
    @given(zeros=st.lists(small_params, min_size=1, max_size=4), z=disk_points)
    def test_blaschke_maps_into_disk(self, zeros, z):
        assert abs(evaluate(Blaschke(tuple(zeros)), z)) < 1.0


class TestValidate:
    def test_dilate(self):
        rep = validate_self_map(Dilate(0.5))
        assert rep.passed and rep.max_modulus == pytest.approx(0.5 * 0.99993896484375, rel=1e-6)

    def test_poly_leaving_the_disk(self):
        rep = validate_self_map(Poly((0.6, 0.6)))
        assert not rep.passed and rep.max_modulus > 1.19
        assert abs(rep.arg_max.imag) < 1e-12 and rep.arg_max.real > 0.99

    def test_poly_inside(self):
        rep = validate_self_map(Poly((0.1, 0.5)))
        assert rep.passed and not rep.exact_kind

    def test_blaschke(self):
        assert validate_self_map(Blaschke((0.5, -0.5))).passed

    def test_needs_enough_samples(self):
        with pytest.raises(ValueError):
            validate_self_map(Identity(), samples=10)

    def test_report_dict(self):
        assert validate_self_map(Identity()).to_dict()["pass"] is True
