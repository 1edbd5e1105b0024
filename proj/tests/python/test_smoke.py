import math

import pytest

import czkit


def two_atoms():
    return czkit.Measure(1, 1.0, [[0.0], [1.0]], [1.0, 1.0])


def test_measure_roundtrip():
    mu = czkit.generate("cantor", seed=3, depth=4)
    assert len(mu) == 16
    again = czkit.Measure.from_dict(mu.to_dict())
    assert again.points() == mu.points()
    assert again.weights == mu.weights


def test_growth_constant():
    mu = czkit.generate("grid", points_per_axis=4)
    assert czkit.growth_constant(mu)["ball_constant"] == pytest.approx(3.0)


def test_maximal_two_atoms():
    mu = two_atoms()
    for kind in ("hl_lower", "hl_upper", "grand_upper", "grand_lower"):
        assert czkit.maximal(mu, [1.0, 1.0], kind) == pytest.approx([1.0, 1.0], abs=1e-12)
    with pytest.raises(czkit.CzkitError):
        czkit.maximal(mu, [1.0, 1.0], "nope")


def test_rbmo_and_h1():
    mu = two_atoms()
    assert czkit.rbmo_norm(mu, [1.0, -1.0]) == pytest.approx(1.0)
    assert czkit.h1_upper_bound(mu, [0.0, 0.0]) == 0.0


def test_cz_decompose():
    mu = czkit.generate("grid", points_per_axis=4)
    dec = czkit.cz_decompose(mu, [8.0, 0.0, 0.0, 0.0], 1.0)
    inv = dec["invariants"]
    assert inv["reconstruction"] and inv["cc4"] and inv["host_rule"]


def test_main_lemma_zero():
    mu = czkit.generate("grid", points_per_axis=4)
    out = czkit.main_lemma(mu, [0.0] * 4)
    assert all(math.isfinite(v) for v in out["h0"])
