import numpy as np
import pytest

from lipsynth.channels import JAW_OPEN, NUM_CHANNELS
from lipsynth.errors import ScriptError, SynthesisError
from lipsynth.library import VisemeLibrary
from lipsynth.series import VisemeTrajectory, resample_trajectory
from lipsynth.synthesis import (
    FusionParams,
    SyllableEvent,
    TimedScript,
    blend_dual,
    blend_triple,
    boundary_discontinuity,
    fusion_weight,
    parse_script,
    script_to_json,
    synthesize,
    synthesize_method_a,
    synthesize_method_b,
)
from lipsynth.synthetic import make_script, synthetic_library


def constant_trajectory(level, n=60):
    return VisemeTrajectory(np.full((n, NUM_CHANNELS), float(level)))


def single_channel_trajectory(level, n=60, channel=JAW_OPEN):
    vals = np.zeros((n, NUM_CHANNELS))
    vals[:, channel] = level
    return VisemeTrajectory(vals)


class TestFusionWeight:
    def test_endpoints_exact(self):
        assert fusion_weight(0.0, 0.7) == 0.0
        assert fusion_weight(1.0, 0.7) == 1.0

    def test_midpoint_values(self):
        assert fusion_weight(0.5, 1.0) == pytest.approx(0.5, abs=1e-15)
        assert fusion_weight(0.5, 0.7) == pytest.approx(0.6155722066724582, abs=1e-12)

    def test_monotone_on_dense_grid(self):
        for a in (0.3, 0.7, 1.0, 2.5):
            w = [fusion_weight(t, a) for t in np.linspace(0, 1, 1001)]
            assert all(w1 >= w0 for w0, w1 in zip(w, w[1:]))

    def test_small_exponent_lies_above_linear_case(self):
        taus = np.linspace(0, 1, 501)
        w07 = np.array([fusion_weight(t, 0.7) for t in taus])
        w10 = np.array([fusion_weight(t, 1.0) for t in taus])
        assert np.all(w07 >= w10 - 1e-15)
        # the 0.5 crossing moves earlier with the smaller exponent
        cross07 = taus[np.argmax(w07 >= 0.5)]
        cross10 = taus[np.argmax(w10 >= 0.5)]
        assert cross07 < cross10

    def test_domain_errors(self):
        with pytest.raises(ValueError):
            fusion_weight(-0.01, 0.7)
        with pytest.raises(ValueError):
            fusion_weight(0.5, 0.0)


class TestBlendDual:
    def test_equal_inputs_pass_through(self):
        rng = np.random.default_rng(0)
        traj = VisemeTrajectory(rng.random((40, NUM_CHANNELS)))
        for tau in (0.0, 0.31, 0.5, 1.0):
            assert np.allclose(blend_dual(traj, traj, tau, 0.7), traj.value_at(tau), atol=1e-15)

    def test_endpoints(self):
        rng = np.random.default_rng(1)
        v1 = VisemeTrajectory(rng.random((30, NUM_CHANNELS)))
        v2 = VisemeTrajectory(rng.random((30, NUM_CHANNELS)))
        assert np.array_equal(blend_dual(v1, v2, 0.0, 0.7), v1.value_at(0.0))
        assert np.array_equal(blend_dual(v1, v2, 1.0, 0.7), v2.value_at(1.0))

    def test_scalar_midpoint_value(self):
        v1 = constant_trajectory(0.0)
        v2 = constant_trajectory(1.0)
        out = blend_dual(v1, v2, 0.5, 0.7)
        assert out[JAW_OPEN] == pytest.approx(0.6155722066724582, abs=1e-12)

    def test_stays_in_envelope(self):
        rng = np.random.default_rng(2)
        v1 = VisemeTrajectory(rng.random((30, NUM_CHANNELS)))
        v2 = VisemeTrajectory(rng.random((30, NUM_CHANNELS)))
        for tau in np.linspace(0, 1, 21):
            out = blend_dual(v1, v2, tau, 0.7)
            lo = np.minimum(v1.value_at(tau), v2.value_at(tau))
            hi = np.maximum(v1.value_at(tau), v2.value_at(tau))
            assert np.all(out >= lo - 1e-12) and np.all(out <= hi + 1e-12)

    def test_sample_count_mismatch(self):
        with pytest.raises(ValueError):
            blend_dual(constant_trajectory(0, 30), constant_trajectory(1, 40), 0.5, 0.7)


class TestBlendTriple:
    def test_continuity_at_division_point(self):
        rng = np.random.default_rng(3)
        for lam in (0.2, 0.5, 0.8):
            v1, v2, v3 = (VisemeTrajectory(rng.random((25, NUM_CHANNELS))) for _ in range(3))
            left = blend_triple(v1, v2, v3, lam, lam)
            right = blend_triple(v1, v2, v3, float(np.nextafter(lam, 1.0)), lam)
            assert np.allclose(left, right, atol=1e-12)
            assert np.allclose(left, v2.value_at(lam), atol=1e-12)

    def test_endpoints(self):
        rng = np.random.default_rng(4)
        v1, v2, v3 = (VisemeTrajectory(rng.random((25, NUM_CHANNELS))) for _ in range(3))
        assert np.array_equal(blend_triple(v1, v2, v3, 0.0, 0.5), v1.value_at(0.0))
        assert np.array_equal(blend_triple(v1, v2, v3, 1.0, 0.5), v3.value_at(1.0))

    def test_scalar_quarter_point(self):
        v1 = constant_trajectory(0.0)
        v2 = constant_trajectory(1.0)
        v3 = constant_trajectory(0.0)
        out = blend_triple(v1, v2, v3, 0.25, 0.5)
        assert out[JAW_OPEN] == pytest.approx(0.5, abs=1e-12)

    def test_lam_domain(self):
        v = constant_trajectory(0.5)
        with pytest.raises(ValueError):
            blend_triple(v, v, v, 0.5, 0.0)


class TestScript:
    def test_parse_round_trip(self):
        script = make_script(["ba", "ma"])
        again = parse_script(script_to_json(script))
        assert again == script

    def test_overlap_rejected(self):
        with pytest.raises(ScriptError, match="overlap"):
            TimedScript(
                events=(
                    SyllableEvent("ba", 0.0, 0.5),
                    SyllableEvent("ma", 0.4, 0.5),
                ),
                total_duration=1.0,
            )

    def test_unsorted_rejected(self):
        with pytest.raises(ScriptError):
            TimedScript(
                events=(
                    SyllableEvent("ba", 1.0, 0.2),
                    SyllableEvent("ma", 0.0, 0.2),
                ),
                total_duration=2.0,
            )

    def test_zero_duration_rejected(self):
        with pytest.raises(ScriptError):
            SyllableEvent("ba", 0.0, 0.0)


@pytest.fixture(scope="module")
def lib():
    return synthetic_library()


def script_of(syllable, duration=1.0, total=2.0):
    return TimedScript(
        events=(SyllableEvent(syllable, 0.0, duration),), total_duration=total
    )


class TestSynthesizeFusion:
    def test_single_viseme_passthrough(self, lib, table):
        script = script_of("a", duration=1.0, total=1.0)
        out = synthesize(script, lib, table, FusionParams(method="C"))
        traj = lib.visemes["V8_A"]
        expected = resample_trajectory(traj, out.frame_count).values
        assert np.allclose(out.values, expected, atol=1e-12)

    def test_silence_decays_to_zero(self, lib, table):
        script = script_of("a", duration=0.5, total=2.0)
        out = synthesize(script, lib, table, FusionParams(method="C"))
        assert np.all(out.values[-1] < 1e-4)
        k_end = int(round(0.5 * 60))
        decayed = out.values[k_end + 1]
        assert np.allclose(decayed, out.values[k_end] * 0.85, atol=1e-12)

    def test_dual_fusion_endpoints(self, lib, table):
        script = script_of("ba", duration=1.0, total=1.0)
        out = synthesize(script, lib, table, FusionParams(method="C"))
        v1 = lib.visemes["V1_BPM"]
        v2 = lib.visemes["V8_A"]
        assert np.allclose(out.values[0], v1.values[0], atol=1e-12)
        assert np.allclose(out.values[-1], v2.values[-1], atol=1e-12)

    def test_triple_fusion_hits_middle_at_lambda(self, lib, table):
        script = script_of("zuo", duration=1.0, total=1.0)
        out = synthesize(script, lib, table, FusionParams(method="C", lam=0.5))
        k = 30  # tau = 0.5 at 60 fps over a 1 s event
        v_mid = lib.visemes["V12_U"].value_at(0.5)
        assert np.allclose(out.values[k], v_mid, atol=1e-12)

    def test_outputs_in_unit_interval(self, lib, table):
        script = make_script(["gua", "zuo", "ba", "ai"])
        for method in "ABC":
            out = synthesize(script, lib, table, FusionParams(method=method))
            assert out.values.min() >= 0.0 and out.values.max() <= 1.0

    def test_deterministic(self, lib, table):
        script = make_script(["zi", "ji", "zuo", "zao", "can"])
        p = FusionParams(method="C")
        a = synthesize(script, lib, table, p)
        b = synthesize(script, lib, table, p)
        assert a == b

    def test_unknown_syllable_names_event(self, lib, table):
        script = TimedScript(
            events=(
                SyllableEvent("ba", 0.0, 0.4),
                SyllableEvent("blorp", 0.5, 0.4),
            ),
            total_duration=1.0,
        )
        with pytest.raises(SynthesisError, match="event 1"):
            synthesize(script, lib, table, FusionParams(method="C"))

    def test_missing_library_viseme_named(self, lib, table):
        partial = VisemeLibrary(
            sample_count=lib.sample_count,
            visemes={"V1_BPM": lib.visemes["V1_BPM"]},
        )
        with pytest.raises(SynthesisError, match="V8_A"):
            synthesize(script_of("ba"), partial, table, FusionParams(method="C"))

    def test_method_d_requires_energy(self, lib, table):
        with pytest.raises(SynthesisError, match="energy"):
            synthesize(script_of("ba"), lib, table, FusionParams(method="D"))


class TestMethodA:
    def test_single_viseme_triangle(self, table):
        n = 20
        vals = np.zeros((n, NUM_CHANNELS))
        vals[:, JAW_OPEN] = np.sin(np.linspace(0, np.pi, n))  # symmetric bump
        lib1 = VisemeLibrary(sample_count=n, visemes={"V8_A": VisemeTrajectory(vals)})
        script = script_of("a", duration=1.0, total=1.0)
        out = synthesize_method_a(script, lib1, table, FusionParams(method="A"))
        jaw = out.values[:, JAW_OPEN]
        peak_k = int(np.argmax(jaw))
        assert peak_k == 30  # event center at 60 fps
        assert jaw[0] == 0.0 and jaw[-1] == 0.0
        # piecewise linear: constant slope on each side of the peak
        up = np.diff(jaw[: peak_k + 1])
        down = np.diff(jaw[peak_k:])
        assert np.allclose(up, up[0], atol=1e-9)
        assert np.allclose(down, down[0], atol=1e-9)

    def test_identical_targets_plateau(self, table):
        lib1 = VisemeLibrary(
            sample_count=10,
            visemes={
                "V1_BPM": constant_trajectory(0.6, 10),
                "V8_A": constant_trajectory(0.6, 10),
            },
        )
        script = script_of("ba", duration=1.0, total=1.0)
        out = synthesize_method_a(script, lib1, table, FusionParams(method="A"))
        jaw = out.values[:, JAW_OPEN]
        # between the two slot centers (t=0.25 and t=0.75) the value holds
        assert np.allclose(jaw[16:45], 0.6, atol=1e-9)

    def test_empty_gap_neutral(self, lib, table):
        script = make_script(["ba"], syllable_duration=0.4, tail=0.6)
        out = synthesize_method_a(script, lib, table, FusionParams(method="A"))
        assert np.allclose(out.values[-20:], 0.0, atol=1e-12)


class TestMethodB:
    def test_slot_layout(self, table):
        lib1 = VisemeLibrary(
            sample_count=10,
            visemes={
                "V1_BPM": constant_trajectory(0.2, 10),
                "V8_A": constant_trajectory(0.9, 10),
            },
        )
        script = script_of("ba", duration=1.0, total=1.0)
        out = synthesize_method_b(script, lib1, table, FusionParams(method="B"))
        jaw = out.values[:, JAW_OPEN]
        # initial slot [0, 0.2): frames 0..11 hold the initial's constant level
        assert np.allclose(jaw[:12], 0.2, atol=1e-12)
        assert np.allclose(jaw[12:], 0.9, atol=1e-12)

    def test_boundary_jump_is_sample_step(self, table):
        lib1 = VisemeLibrary(
            sample_count=10,
            visemes={
                "V1_BPM": constant_trajectory(0.2, 10),
                "V8_A": constant_trajectory(0.9, 10),
            },
        )
        script = script_of("ba", duration=1.0, total=1.0)
        params = FusionParams(method="B")
        out = synthesize_method_b(script, lib1, table, params)
        jump = boundary_discontinuity(out, script, table, params)
        assert jump == pytest.approx(0.7, abs=1e-12)

    def test_single_viseme_matches_fusion(self, lib, table):
        script = script_of("a", duration=0.8, total=1.2)
        b = synthesize(script, lib, table, FusionParams(method="B"))
        c = synthesize(script, lib, table, FusionParams(method="C"))
        assert b == c


class TestBoundaryDiscontinuity:
    def test_fusion_smoother_than_hard_cuts(self, lib, table):
        script = make_script(["ba", "gua", "zuo", "mai"])
        pb = FusionParams(method="B")
        pc = FusionParams(method="C")
        b = synthesize(script, lib, table, pb)
        c = synthesize(script, lib, table, pc)
        assert boundary_discontinuity(c, script, table, pc) <= boundary_discontinuity(
            b, script, table, pb
        )


def test_method_a_norm_target_mode(table):
    # a trajectory whose largest L2-norm frame differs from its jaw-open peak
    vals = np.zeros((10, NUM_CHANNELS))
    vals[3, JAW_OPEN] = 0.9                      # jaw peak at sample 3
    vals[7, :6] = 0.8                            # larger overall norm at sample 7
    lib1 = VisemeLibrary(sample_count=10, visemes={"V8_A": VisemeTrajectory(vals)})
    script = script_of("a", duration=1.0, total=1.0)
    by_jaw = synthesize_method_a(script, lib1, table, FusionParams(method="A"))
    by_norm = synthesize_method_a(
        script, lib1, table, FusionParams(method="A", static_target="norm")
    )
    k = 30  # keyframe at the event center
    assert by_jaw.values[k, JAW_OPEN] == pytest.approx(0.9, abs=1e-12)
    assert by_norm.values[k, 0] == pytest.approx(0.8, abs=1e-12)


def test_empty_script_all_neutral(lib, table):
    script = TimedScript(events=(), total_duration=1.0)
    for method in "ABC":
        out = synthesize(script, lib, table, FusionParams(method=method))
        assert out.frame_count == 61
        assert np.all(out.values == 0.0)
