import math

import numpy as np
import pytest

import thinlab as tl


def rel_l2(a, b):
    return np.linalg.norm(a - b) / np.linalg.norm(b)


@pytest.fixture(scope="module")
def spec():
    return tl.GridSpec(dim=1, extent=64.0, samples=4096)


def test_gaussian_roundtrip(spec):
    x = np.array([-0.5 * spec.extent + spec.spacing() * i for i in range(spec.samples)])
    f = tl.GridFunction(spec, np.exp(-math.pi * x * x).astype(complex))

    fhat = tl.forward_transform(f)
    # N/R = R here, so the dual grid coincides with the primal one and the
    # Gaussian is a fixed point of the transform
    assert fhat.spec == spec.dual()
    assert rel_l2(fhat.values(), f.values()) <= 1e-8

    back = tl.inverse_transform(fhat)
    assert rel_l2(back.values(), f.values()) <= 1e-10

    assert tl.energy(f) == pytest.approx(1.0 / math.sqrt(2.0), rel=1e-8)


def test_splitting_identity(spec):
    op = tl.OperatorPair("wolff", spec)
    f = tl.make_corpus(spec, 3, 11)[2]
    s = op.apply_S(f).values()
    t = op.apply_T(f).values()
    assert rel_l2(s + t, f.values()) <= 1e-8


def test_compatibility_presets():
    good = tl.check_compatibility(tl.parse_pair("wolff"))
    # equality pair: the raw margin sits within a few ulps of t below zero
    assert good.holds and good.worst_margin >= -1e-6
    bad = tl.check_compatibility(tl.parse_pair("incompat"))
    assert not bad.holds


def test_thinness_certificate():
    # half-width 0.1 * rho(outermost spike), so the measured density tracks 0.1
    E = tl.periodic_thin_set(1, 8, 0.0125)
    cert = tl.certify_thinness(E, tl.RadiusFunction.parse("powerlaw:a=1"),
                               (-8.0, 0.0), (8.0, 0.0))
    assert 0.0 < cert.epsilon_measured <= 0.1


def test_ladder_decreasing():
    rungs = tl.counterexample_ladder(tl.parse_pair("incompat"), 0.1, [2.0, 4.0])
    assert len(rungs) == 2
    assert rungs[0].ratio > rungs[1].ratio > 0.0
    for r in rungs:
        assert r.defect == pytest.approx(1.0 / r.ratio, rel=1e-9)
        assert r.thinness_E <= 0.1 * (1 + 1e-9)


def test_contraction_beta():
    sym = tl.SymbolPair(tl.AtomicMeasure.bernoulli(), tl.AtomicMeasure.bernoulli(),
                        2.0, 0.05)
    rep = tl.composition_norm(sym, tl.GridSpec(1, 64.0, 2048))
    assert rep.converged
    assert rep.beta == pytest.approx(0.916943, abs=2e-3)
    assert rep.beta <= 1.0 - 1e-3


def test_experiment_driver_dict():
    out = tl.run_cover(1, 5, 3)
    assert out["ok"]
    assert len(out["rows"]) == 5
    assert "constant" in out["columns"]
