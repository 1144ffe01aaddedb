import subprocess
import sys

import numpy as np
import pytest

from lipsynth.cli import main
from lipsynth.pinyin import VISEME_IDS
from lipsynth.series import series_csv_text
from lipsynth.synthetic import cosine_cycle_series


def run(*argv) -> int:
    return main([str(a) for a in argv])


@pytest.fixture(scope="module")
def fixture_tree(tmp_path_factory):
    root = tmp_path_factory.mktemp("fixtures")
    assert run("--quiet", "gen-synthetic", "--out-dir", root, "--seed", "42") == 0
    return root


@pytest.fixture(scope="module")
def built_library(fixture_tree, tmp_path_factory):
    out = tmp_path_factory.mktemp("lib") / "lib.json"
    pairs = [f"{vid}={fixture_tree / 'captures' / (vid + '.csv')}" for vid in VISEME_IDS]
    assert run("--quiet", "build-lib", *pairs, "--out", out) == 0
    return out


class TestGenSynthetic:
    def test_layout(self, fixture_tree):
        assert len(list((fixture_tree / "captures").glob("*.csv"))) == 14
        assert len(list((fixture_tree / "scripts").glob("*.json"))) == 4
        assert len(list((fixture_tree / "audio").glob("*.wav"))) == 4

    def test_deterministic(self, fixture_tree, tmp_path):
        again = tmp_path / "again"
        assert run("--quiet", "gen-synthetic", "--out-dir", again, "--seed", "42") == 0
        for sub in ("captures", "scripts", "audio"):
            for path in sorted((fixture_tree / sub).iterdir()):
                assert path.read_bytes() == (again / sub / path.name).read_bytes()

    def test_seed_changes_captures(self, fixture_tree, tmp_path):
        other = tmp_path / "other"
        assert run("--quiet", "gen-synthetic", "--out-dir", other, "--seed", "7") == 0
        a = (fixture_tree / "captures" / "V8_A.csv").read_bytes()
        b = (other / "captures" / "V8_A.csv").read_bytes()
        assert a != b


class TestBuildLib:
    def test_library_has_all_visemes(self, built_library):
        from lipsynth.library import load_library

        lib = load_library(built_library)
        assert set(lib.visemes) == set(VISEME_IDS)
        assert lib.sample_count == 60

    def test_rerun_byte_identical(self, fixture_tree, built_library, tmp_path):
        out = tmp_path / "lib2.json"
        pairs = [f"{vid}={fixture_tree / 'captures' / (vid + '.csv')}" for vid in VISEME_IDS]
        assert run("--quiet", "build-lib", *pairs, "--out", out) == 0
        assert out.read_bytes() == built_library.read_bytes()

    def test_insufficient_cycles_names_viseme(self, tmp_path, capsys):
        capture = tmp_path / "v8.csv"
        capture.write_text(series_csv_text(cosine_cycle_series(n_cycles=2)))
        out = tmp_path / "lib.json"
        code = run("--quiet", "build-lib", f"V8_A={capture}", "--out", out)
        assert code == 1
        err = capsys.readouterr().err
        assert "V8_A" in err and "insufficient" in err
        assert not out.exists()  # no partial output

    def test_update_merges(self, fixture_tree, built_library, tmp_path):
        from lipsynth.library import load_library

        single = tmp_path / "single.json"
        pair = f"V1_BPM={fixture_tree / 'captures' / 'V1_BPM.csv'}"
        assert run("--quiet", "build-lib", pair, "--out", single) == 0
        merged = tmp_path / "merged.json"
        pair2 = f"V8_A={fixture_tree / 'captures' / 'V8_A.csv'}"
        assert run("--quiet", "build-lib", pair2, "--update", single, "--out", merged) == 0
        lib = load_library(merged)
        assert set(lib.visemes) == {"V1_BPM", "V8_A"}


class TestSynth:
    def test_method_c(self, fixture_tree, built_library, tmp_path):
        out = tmp_path / "c.csv"
        code = run(
            "--quiet", "synth",
            "--script", fixture_tree / "scripts" / "s3.json",
            "--library", built_library,
            "--method", "C",
            "--out", out,
        )
        assert code == 0
        header = out.read_text().splitlines()[0]
        assert header.count(",") == 27
        assert len(out.read_text().splitlines()) == 1 + 157  # 2.6 s at 60 fps

    def test_method_d_requires_audio(self, fixture_tree, built_library, tmp_path):
        with pytest.raises(SystemExit) as exc:
            run(
                "synth",
                "--script", fixture_tree / "scripts" / "s3.json",
                "--library", built_library,
                "--method", "D",
                "--out", tmp_path / "d.csv",
            )
        assert exc.value.code == 2

    def test_method_d_deterministic(self, fixture_tree, built_library, tmp_path):
        outs = []
        for name in ("d1.csv", "d2.csv"):
            out = tmp_path / name
            code = run(
                "--quiet", "synth",
                "--script", fixture_tree / "scripts" / "s1.json",
                "--library", built_library,
                "--method", "D",
                "--audio", fixture_tree / "audio" / "s1.wav",
                "--out", out,
            )
            assert code == 0
            outs.append(out.read_bytes())
        assert outs[0] == outs[1]

    def test_unknown_syllable_exits_1(self, built_library, tmp_path, capsys):
        script = tmp_path / "bad.json"
        script.write_text(
            '{"events": [{"syllable": "qqq", "start_s": 0.0, "duration_s": 0.4}]}'
        )
        code = run("--quiet", "synth", "--script", script,
                   "--library", built_library, "--out", tmp_path / "x.csv")
        assert code == 1
        assert "event 0" in capsys.readouterr().err


class TestRetargetEval:
    def test_retarget_14_columns(self, fixture_tree, built_library, tmp_path):
        traj = tmp_path / "t.csv"
        run("--quiet", "synth", "--script", fixture_tree / "scripts" / "s2.json",
            "--library", built_library, "--out", traj)
        act = tmp_path / "a.csv"
        assert run("--quiet", "retarget", "--input", traj, "--out", act) == 0
        header = act.read_text().splitlines()[0].split(",")
        assert len(header) == 15  # time_s + 14 actuators
        assert header[0] == "time_s"

    def test_retarget_missing_column_exits_1(self, tmp_path, capsys):
        bad = tmp_path / "bad.csv"
        bad.write_text("time_s,jawOpen\n0.0,0.5\n0.1,0.6\n")
        code = run("--quiet", "retarget", "--input", bad, "--out", tmp_path / "a.csv")
        assert code == 1

    def test_eval_identity(self, fixture_tree, built_library, tmp_path, capsys):
        traj = tmp_path / "t.csv"
        run("--quiet", "synth", "--script", fixture_tree / "scripts" / "s4.json",
            "--library", built_library, "--out", traj)
        report = tmp_path / "r.json"
        code = run("eval", "--generated", traj, "--reference", traj, "--out", report)
        assert code == 0
        out = capsys.readouterr().out
        assert "1.0000" in out and "0.0000" in out
        assert report.exists()

    def test_eval_no_overlap_exits_1(self, tmp_path):
        import lipsynth

        rng = np.random.default_rng(0)
        a = lipsynth.FrameSeries(rng.random((30, 27)), fps=60.0, start_time=0.0)
        b = lipsynth.FrameSeries(rng.random((30, 27)), fps=60.0, start_time=10.0)
        pa, pb = tmp_path / "a.csv", tmp_path / "b.csv"
        pa.write_text(series_csv_text(a))
        pb.write_text(series_csv_text(b))
        assert run("--quiet", "eval", "--generated", pa, "--reference", pb) == 1


class TestMap:
    def test_zuo(self, capsys):
        assert run("map", "zuo") == 0
        assert capsys.readouterr().out.strip() == "V6_ZCS V12_U V9_O"

    def test_shi(self, capsys):
        assert run("map", "shi") == 0
        assert capsys.readouterr().out.strip() == "V7_ZH V11_I"

    def test_bare_initial_fails(self, capsys):
        assert run("map", "f") == 1


def test_console_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "lipsynth.cli", "map", "ba"],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0
    assert proc.stdout.strip() == "V1_BPM V8_A"


def test_eval_jerk_csv_written(fixture_tree, built_library, tmp_path):
    traj = tmp_path / "t.csv"
    run("--quiet", "synth", "--script", fixture_tree / "scripts" / "s1.json",
        "--library", built_library, "--out", traj)
    jerk = tmp_path / "jerk.csv"
    assert run("--quiet", "eval", "--generated", traj, "--reference", traj,
               "--jerk-csv", jerk) == 0
    lines = jerk.read_text().splitlines()
    assert lines[0].startswith("frame_index,")
    assert lines[0].count(",") == 9  # index + 9 active channels
    assert len(lines) > 100


def test_build_lib_update_sample_count_mismatch(fixture_tree, built_library, tmp_path):
    out = tmp_path / "merged.json"
    pair = f"V8_A={fixture_tree / 'captures' / 'V8_A.csv'}"
    code = run("--quiet", "build-lib", pair, "--update", built_library,
               "--target-samples", "48", "--out", out)
    assert code == 1
    assert not out.exists()


def test_capture_with_one_row_rejected(tmp_path, capsys):
    from lipsynth.channels import CHANNELS

    bad = tmp_path / "one.csv"
    bad.write_text("time_s," + ",".join(CHANNELS) + "\n" + "0.0" + ",0.0" * 27 + "\n")
    code = run("--quiet", "retarget", "--input", bad, "--out", tmp_path / "o.csv")
    assert code == 1
    assert "2 data rows" in capsys.readouterr().err
