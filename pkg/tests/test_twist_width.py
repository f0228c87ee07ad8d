"""Twist profiles, the coupling vector, and the second-order width formula."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from twistres import (ConfigError, DegenerateTargetError, PotentialSpec,
                      ThresholdCollisionError, TwistProfile,
                      classify_spectrum, coupling_matrices, coupling_vector,
                      delta_gradient_im, delta_limit_bound_state,
                      limit_width_delta, solve_transverse_modes,
                      threshold_index, width_coefficient, width_vs_nu)
from twistres.cross_section import CrossSectionSpec


# ---------------------------------------------------------------------------
# twist profiles


def test_linear_profile_is_the_unit_rate_twist(linear_twist):
    x = np.array([-3.0, 0.0, 1.7])
    assert linear_twist.analytic
    np.testing.assert_array_equal(np.real(linear_twist.ad(x)), 1.0)
    np.testing.assert_array_equal(np.real(linear_twist.add(x)), 0.0)
    np.testing.assert_array_equal(linear_twist.alpha(x), x)


def test_compact_profile_plateau_and_support():
    tw = TwistProfile.compact(2.0)
    assert tw.analytic
    assert complex(tw.ad(0.5)) == 1.0
    assert complex(tw.ad(2.0)) == 1.0
    assert complex(tw.ad(4.0)) == 0.0
    assert complex(tw.ad(7.0)) == 0.0
    assert 0.0 < np.real(tw.ad(3.0)) < 1.0
    assert np.real(tw.add(3.0)) < 0.0
    assert complex(tw.add(1.0)) == 0.0
    assert complex(tw.add(5.0)) == 0.0
    # the total angle saturates at 1.5 X on either side
    assert float(tw.alpha(4.0)) == pytest.approx(3.0, abs=1e-14)
    assert float(tw.alpha(25.0)) == pytest.approx(3.0, abs=1e-14)
    assert float(tw.alpha(-25.0)) == pytest.approx(-3.0, abs=1e-14)


def test_compact_profile_joins_are_gentle():
    tw = TwistProfile.compact(2.0)
    d = 1e-3
    for edge, val in ((2.0, 1.0), (4.0, 0.0)):
        assert abs(complex(tw.ad(edge + d)) - val) <= 1e-8 or \
            abs(complex(tw.ad(edge - d)) - val) <= 1e-8
        assert abs(complex(tw.add(edge + d))) <= 1e-5
        assert abs(complex(tw.add(edge - d))) <= 1e-5


@settings(max_examples=40, deadline=None)
@given(X=st.floats(min_value=0.5, max_value=5.0),
       x=st.floats(min_value=-12.0, max_value=12.0))
def test_compact_angle_is_odd_and_integrates_the_rate(X, x):
    tw = TwistProfile.compact(X)
    assert float(tw.alpha(-x)) == pytest.approx(-float(tw.alpha(x)),
                                                abs=1e-12)
    d = 1e-6
    fd = (float(tw.alpha(x + d)) - float(tw.alpha(x - d))) / (2 * d)
    assert fd == pytest.approx(float(np.real(tw.ad(x))), abs=1e-8)
    fd = (complex(tw.ad(x + d)) - complex(tw.ad(x - d))).real / (2 * d)
    assert fd == pytest.approx(float(np.real(tw.add(x))), abs=1e-7)


def test_compact_profile_guards():
    with pytest.raises(ConfigError, match="positive"):
        TwistProfile.compact(0.0)
    with pytest.raises(ConfigError, match="positive"):
        TwistProfile.compact(-1.0)


def test_sampled_twist_construction_and_lookup():
    x = np.linspace(-5.0, 5.0, 501)
    ad = np.exp(-(x**2))
    tw = TwistProfile.sampled(x, ad)
    assert not tw.analytic
    assert complex(tw.ad(0.0)) == pytest.approx(1.0, abs=1e-12)
    # beyond the table the rate clamps to the end values
    assert complex(tw.ad(9.0)) == pytest.approx(ad[-1], abs=1e-15)
    assert float(tw.alpha(0.0)) == 0.0
    assert float(tw.alpha(5.0)) == pytest.approx(-float(tw.alpha(-5.0)),
                                                 abs=1e-12)
    # an explicit second derivative is used verbatim
    tw2 = TwistProfile.sampled(x, ad, alpha_ddot=np.zeros_like(x))
    assert complex(tw2.add(0.3)) == 0.0


def test_sampled_twist_guards():
    x = np.linspace(-1, 1, 11)
    with pytest.raises(ConfigError, match="matching"):
        TwistProfile.sampled(x, np.ones(10))
    with pytest.raises(ConfigError, match="increasing"):
        TwistProfile.sampled(x[::-1], np.ones(11))
    with pytest.raises(ConfigError, match="nonnegative"):
        TwistProfile.sampled(x, -np.ones(11))
    bad = np.ones(11)
    bad[3] = np.nan
    with pytest.raises(ConfigError, match="finite"):
        TwistProfile.sampled(x, bad)
    with pytest.raises(ConfigError, match="length"):
        TwistProfile.sampled(x, np.ones(11), alpha_ddot=np.ones(4))


def test_sampled_twist_extends_linearly_in_the_complex_step():
    tw = TwistProfile.sampled(np.array([0.0, 1.0, 2.0]),
                              np.array([0.0, 1.0, 0.5]))
    assert complex(tw.ad(0.5 + 0.2j)) == pytest.approx(0.5 + 0.2j, abs=1e-15)
    assert complex(tw.ad(1.5 + 0.4j)) == pytest.approx(0.75 - 0.2j, abs=1e-15)


# ---------------------------------------------------------------------------
# the induced coupling vector


def test_coupling_vector_combines_rate_and_curvature(linear_twist,
                                                     sech_state_nu1):
    v = coupling_vector(linear_twist, sech_state_nu1)
    x = np.array([-1.0, 0.2, 2.5])
    np.testing.assert_allclose(v(x), -2.0 * sech_state_nu1.dphi(x),
                               atol=1e-15)
    assert v.decay_radius == sech_state_nu1.decay_radius

    tw = TwistProfile.compact(3.0)
    v = coupling_vector(tw, sech_state_nu1)
    assert v.decay_radius == 6.0
    got = v(np.array([4.0]))
    want = (-2.0 * tw.ad(4.0) * sech_state_nu1.dphi(4.0)
            - tw.add(4.0) * sech_state_nu1.phi(4.0))
    np.testing.assert_allclose(got, want, atol=1e-15)


def test_coupling_vector_refuses_tabulated_twists(sech_state_nu1):
    x = np.linspace(-4, 4, 81)
    tw = TwistProfile.sampled(x, np.exp(-(x**2)))
    with pytest.raises(ConfigError, match="analytic"):
        coupling_vector(tw, sech_state_nu1)


# ---------------------------------------------------------------------------
# spectrum classification


def test_classification_splits_at_the_first_threshold(rect_modes):
    cls = classify_spectrum(rect_modes, PotentialSpec.poschl_teller(1.0))
    assert cls.thresholds == tuple(float(t) for t in
                                   oracles.RECT_EIGENVALUES)
    assert len(cls.entries) == 6
    assert len(cls.sigma_minus) == 1
    assert len(cls.sigma_plus) == 5
    below = cls.sigma_minus[0]
    assert (below.n, below.j) == (1, 1)
    assert below.E == pytest.approx(5.0 + oracles.sech_well_levels(1.0)[0],
                                    rel=1e-12)
    Es = [e.E for e in cls.entries]
    assert Es == sorted(Es)
    by_n = {e.n: e for e in cls.entries}
    assert by_n[2].simple and by_n[2].embedded
    assert not by_n[5].simple and not by_n[6].simple


def test_classification_accepts_tabulated_potentials(rect_modes):
    x = np.arange(-30.0, 30.0 + 1e-9, 0.01)
    table = PotentialSpec.sampled(
        x, np.real(PotentialSpec.poschl_teller(1.0).V(x)))
    cls = classify_spectrum(rect_modes, table)
    ref = classify_spectrum(rect_modes, PotentialSpec.poschl_teller(1.0))
    assert len(cls.entries) == len(ref.entries)
    for got, want in zip(cls.entries, ref.entries):
        assert got.E == pytest.approx(want.E, abs=1e-4)


def test_threshold_index_counts_strictly_open_channels():
    thresholds = (5.0, 8.0, 13.0)
    assert threshold_index(4.0, thresholds) == 0
    assert threshold_index(8.0, thresholds) == 1
    assert threshold_index(8.0000001, thresholds) == 2
    assert threshold_index(50.0, thresholds) == 3


# ---------------------------------------------------------------------------
# width coefficient: guards


def test_width_guard_battery(rect_modes, rect_coupling, delta_potential,
                             linear_twist):
    with pytest.raises(ConfigError, match="outside"):
        width_coefficient(rect_modes, rect_coupling, delta_potential,
                          linear_twist, n=9)
    with pytest.raises(ConfigError, match="does not exist"):
        width_coefficient(rect_modes, rect_coupling,
                          PotentialSpec.poschl_teller(1.0), linear_twist,
                          n=2, j=2)
    with pytest.raises(DegenerateTargetError, match="degenerate"):
        width_coefficient(rect_modes, rect_coupling, delta_potential,
                          linear_twist, n=5)
    with pytest.raises(ConfigError, match="below the first threshold"):
        width_coefficient(rect_modes, rect_coupling, delta_potential,
                          linear_twist, n=1)
    with pytest.raises(ConfigError, match="analytic"):
        x = np.linspace(-4, 4, 81)
        width_coefficient(rect_modes, rect_coupling, delta_potential,
                          TwistProfile.sampled(x, np.exp(-(x**2))), n=2)


def test_width_refuses_targets_on_a_threshold(linear_twist, delta_potential):
    # aspect ratio tuned so the second and third thresholds differ by
    # exactly the binding energy 1/4
    spec = CrossSectionSpec.rectangle(np.pi, np.pi * np.sqrt(12.0 / 11.0))
    modes = solve_transverse_modes(spec, 3)
    cm = coupling_matrices(modes)
    with pytest.raises(ThresholdCollisionError, match="threshold"):
        width_coefficient(modes, cm, delta_potential, linear_twist, n=3)


# ---------------------------------------------------------------------------
# width coefficient: values


def test_width_channel_structure_point_interaction(rect_modes, rect_coupling,
                                                   delta_potential,
                                                   linear_twist):
    res = width_coefficient(rect_modes, rect_coupling, delta_potential,
                            linear_twist, n=2, engine="kernel")
    assert res.E == pytest.approx(7.75, abs=1e-12)
    assert res.k_star == 1
    assert res.a == pytest.approx(oracles.A_LIMIT_RECT, rel=1e-4)
    assert res.a == sum(c.contribution for c in res.channels)
    assert res.C0 == pytest.approx(oracles.C0_RECT_LINEAR, abs=1e-10)

    ch = {c.k: c for c in res.channels}
    assert ch[1].open and not ch[2].open
    assert ch[1].lam == pytest.approx(2.75, abs=1e-12)
    assert ch[1].im_resolvent == pytest.approx(
        4.0 * oracles.delta_form_im(2.75), abs=5e-6)
    assert ch[1].contribution == ch[1].coupling**2 * ch[1].im_resolvent
    # the diagonal coupling entry vanishes, so the on-pole channel is skipped
    assert ch[2].coupling == 0.0 and ch[2].im_resolvent is None
    assert abs(ch[5].coupling) < 1e-13 and ch[5].im_resolvent is None
    # closed channels couple but contribute nothing to the width
    for k in (3, 4, 6):
        assert ch[k].coupling != 0.0
        assert ch[k].im_resolvent == 0.0 and ch[k].contribution == 0.0
        assert np.isfinite(ch[k].re_resolvent)


def test_width_contour_engine_matches_closed_form(rect_modes, rect_coupling,
                                                  delta_potential,
                                                  linear_twist):
    res = width_coefficient(rect_modes, rect_coupling, delta_potential,
                            linear_twist, n=2)
    assert res.a == pytest.approx(oracles.A_LIMIT_RECT, abs=1e-6)


def test_symmetric_disk_mode_has_no_width(disk_modes, disk_coupling,
                                          linear_twist):
    res = width_coefficient(disk_modes, disk_coupling,
                            PotentialSpec.poschl_teller(1.0), linear_twist,
                            n=6)
    assert res.a == 0.0
    assert res.k_star == 5
    assert all(c.im_resolvent is None for c in res.channels)


# ---------------------------------------------------------------------------
# the deep-well limit


def test_limit_width_closed_form_and_guards():
    lw = limit_width_delta(5.0, 8.0, -2.0 / 3.0)
    assert lw.lam == pytest.approx(2.75, abs=1e-15)
    assert lw.a == pytest.approx(oracles.A_LIMIT_RECT, rel=1e-12)
    assert not lw.trivial
    assert limit_width_delta(5.0, 8.0, 0.0).trivial
    assert limit_width_delta(5.0, 8.0, 0.0).a == 0.0
    with pytest.raises(ConfigError, match="embedded"):
        limit_width_delta(5.0, 5.2, -2.0 / 3.0)
    with pytest.raises(ConfigError, match="lam > 0"):
        delta_gradient_im(-1.0)
    assert delta_gradient_im(oracles.DELTA_FORM_LAMBDA) == pytest.approx(
        oracles.DELTA_FORM_IM_STATED, abs=1e-7)


@settings(max_examples=40, deadline=None)
@given(c1=st.floats(min_value=0.05, max_value=3.0),
       gap=st.floats(min_value=0.3, max_value=20.0))
def test_limit_width_scales_with_the_coupling_squared(c1, gap):
    one = limit_width_delta(1.0, 1.0 + gap, c1)
    two = limit_width_delta(1.0, 1.0 + gap, 2.0 * c1)
    assert two.a == pytest.approx(4.0 * one.a, rel=1e-12)
    assert one.a == pytest.approx(
        4.0 * c1**2 * oracles.delta_form_im(gap - 0.25), rel=1e-12)


def test_width_approaches_the_deep_well_limit(rect_modes, rect_coupling,
                                              linear_twist):
    scan = width_vs_nu(rect_modes, rect_coupling, linear_twist, 2,
                       (10.0, 100.0))
    assert scan.monotone
    assert scan.a_limit == pytest.approx(oracles.A_LIMIT_RECT, abs=1e-8)
    for row in scan.rows:
        assert row.a == pytest.approx(oracles.A_SECH_LADDER[int(row.nu)],
                                      rel=1e-6)
        assert row.distance == abs(row.a - scan.a_limit)
    with pytest.raises(ConfigError, match="empty"):
        width_vs_nu(rect_modes, rect_coupling, linear_twist, 2, ())
