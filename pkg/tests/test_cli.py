import itertools
import json

import numpy as np
import pytest
from click.testing import CliRunner

from palettekit.cli import main
from palettekit.evidence import Marker, TrialRecord, write_trials


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def evidence_arg(demo_evidence_dir):
    return str(demo_evidence_dir)


def _color_trial_log(path, seed=0, n_palettes=60, reps=8):
    """Color-only trial log over 10 colors with dense pair coverage."""
    rng = np.random.default_rng(seed)
    palettes = list(itertools.combinations(range(10), 3))
    rng.shuffle(palettes)
    records = []
    t = 0
    for pal in palettes[:n_palettes]:
        acc = float(rng.uniform(0.4, 1.0))
        for _ in range(reps):
            markers = tuple(Marker(color_id=c) for c in pal)
            correct = bool(rng.random() < acc)
            records.append(TrialRecord(f"t{t}", 3, markers, 0,
                                       0 if correct else 1, correct))
            t += 1
    write_trials(records, path)
    return path


# ---------------------------------------------------------------------------
# generate
# ---------------------------------------------------------------------------

def test_generate_color_only(runner, evidence_arg):
    res = runner.invoke(main, ["generate", "--type", "color_only", "--n", "4",
                               "--k", "3", "--evidence", evidence_arg])
    assert res.exit_code == 0, res.output
    data = json.loads(res.output)
    assert len(data["palettes"]) == 3
    assert [p["rank"] for p in data["palettes"]] == [1, 2, 3]
    for p in data["palettes"]:
        assert p["encoding"] == "color_only"
        assert all("hex" in e for e in p["entries"])


def test_generate_redundant(runner, evidence_arg):
    res = runner.invoke(main, ["generate", "--type", "redundant", "--n", "3",
                               "--k", "2", "--evidence", evidence_arg])
    assert res.exit_code == 0, res.output
    data = json.loads(res.output)
    for p in data["palettes"]:
        for e in p["entries"]:
            assert "color_id" in e and "shape_id" in e and "shape" in e


def test_generate_deterministic(runner, evidence_arg):
    args = ["generate", "--type", "color_only", "--n", "5",
            "--seed", "3", "--evidence", evidence_arg]
    a = runner.invoke(main, args)
    b = runner.invoke(main, args)
    assert a.exit_code == b.exit_code == 0
    assert a.output == b.output


def test_generate_auto_note_on_stderr(runner, evidence_arg):
    res = runner.invoke(main, ["generate", "--type", "auto", "--n", "2",
                               "--evidence", evidence_arg])
    assert res.exit_code == 0, res.output
    assert "note: auto-selected color_only" in res.stderr
    data = json.loads(res.stdout)
    assert data["palettes"][0]["encoding"] == "color_only"
    assert "redundancy" in data["note"]


def test_generate_auto_mid_range_is_redundant(runner, evidence_arg):
    res = runner.invoke(main, ["generate", "--type", "auto", "--n", "6",
                               "--k", "1", "--evidence", evidence_arg])
    assert res.exit_code == 0, res.output
    assert json.loads(res.output)["palettes"][0]["encoding"] == "redundant"


def test_generate_respects_constraints(runner, evidence_arg):
    res = runner.invoke(main, ["generate", "--type", "color_only", "--n", "3",
                               "--require-color", "0", "--exclude-color", "1",
                               "--evidence", evidence_arg])
    assert res.exit_code == 0, res.output
    for p in json.loads(res.output)["palettes"]:
        ids = {e["color_id"] for e in p["entries"]}
        assert 0 in ids and 1 not in ids


def test_generate_usage_errors(runner, evidence_arg):
    assert runner.invoke(main, ["generate", "--evidence", evidence_arg]).exit_code == 2
    assert runner.invoke(main, ["generate", "--n", "11",
                                "--evidence", evidence_arg]).exit_code == 2
    assert runner.invoke(main, ["generate", "--type", "bogus", "--n", "4",
                                "--evidence", evidence_arg]).exit_code == 2
    # neither --evidence nor --trials
    assert runner.invoke(main, ["generate", "--n", "4"]).exit_code == 2


def test_generate_constraint_error_exits_3(runner, evidence_arg):
    res = runner.invoke(main, ["generate", "--type", "color_only", "--n", "2",
                               "--require-color", "0", "--require-color", "1",
                               "--require-color", "2",
                               "--evidence", evidence_arg])
    assert res.exit_code == 3
    assert "error:" in res.stderr


# ---------------------------------------------------------------------------
# swap
# ---------------------------------------------------------------------------

def test_swap_roundtrip(runner, evidence_arg, tmp_path):
    res = runner.invoke(main, ["generate", "--type", "redundant", "--n", "3",
                               "--k", "1", "--evidence", evidence_arg])
    assert res.exit_code == 0, res.output
    top = json.loads(res.output)["palettes"][0]
    pf = tmp_path / "palette.json"
    pf.write_text(json.dumps(top))
    old = top["entries"][0]
    res = runner.invoke(main, ["swap", "--palette-file", str(pf),
                               "--position", "0", "--evidence", evidence_arg])
    assert res.exit_code == 0, res.output
    out = json.loads(res.output)
    assert old["color_id"] in out["excluded_colors"]
    assert old["shape_id"] in out["excluded_shapes"]
    new = out["palette"]["entries"][0]
    assert (new["color_id"], new["shape_id"]) != (old["color_id"], old["shape_id"])


def test_swap_bad_palette_file(runner, evidence_arg, tmp_path):
    pf = tmp_path / "bad.json"
    pf.write_text("{not json")
    res = runner.invoke(main, ["swap", "--palette-file", str(pf),
                               "--position", "0", "--evidence", evidence_arg])
    assert res.exit_code == 3
    assert "bad palette file" in res.stderr


def test_swap_position_out_of_range(runner, evidence_arg, tmp_path):
    res = runner.invoke(main, ["generate", "--type", "color_only", "--n", "3",
                               "--k", "1", "--evidence", evidence_arg])
    pf = tmp_path / "p.json"
    pf.write_text(json.dumps(json.loads(res.output)["palettes"][0]))
    res = runner.invoke(main, ["swap", "--palette-file", str(pf),
                               "--position", "9", "--evidence", evidence_arg])
    assert res.exit_code == 3


# ---------------------------------------------------------------------------
# ingest / matrix
# ---------------------------------------------------------------------------

def test_ingest_then_matrix(runner, tmp_path):
    log = _color_trial_log(tmp_path / "trials.txt")
    out = tmp_path / "ev"
    res = runner.invoke(main, ["ingest", str(log), "--out", str(out)])
    assert res.exit_code == 0, res.output
    assert "ingested 480 trials" in res.output
    assert (out / "color_all.json").exists()
    res = runner.invoke(main, ["matrix", "--axis", "color",
                               "--evidence", str(out), "--format", "json"])
    assert res.exit_code == 0, res.output
    data = json.loads(res.output)
    assert data["axis"] == "color"
    res = runner.invoke(main, ["matrix", "--axis", "color", "--bin", "small",
                               "--evidence", str(out)])
    assert res.exit_code == 0
    assert "\t" in res.output  # table format


def test_matrix_missing_bin(runner, tmp_path, synth_model):
    synth_model.save_dir(tmp_path)  # only all-bin matrices
    res = runner.invoke(main, ["matrix", "--axis", "color", "--bin", "large",
                               "--evidence", str(tmp_path)])
    assert res.exit_code == 3


def test_ingest_bad_log(runner, tmp_path):
    bad = tmp_path / "bad.txt"
    bad.write_text("no header here\n")
    res = runner.invoke(main, ["ingest", str(bad), "--out", str(tmp_path / "ev")])
    assert res.exit_code == 3


# ---------------------------------------------------------------------------
# stim / plan / validate / report
# ---------------------------------------------------------------------------

def test_stim_stdout_and_file(runner, tmp_path):
    res = runner.invoke(main, ["stim", "--n", "3", "--seed", "5"])
    assert res.exit_code == 0
    assert res.output.startswith("<svg ")
    out = tmp_path / "s.svg"
    res = runner.invoke(main, ["stim", "--n", "3", "--seed", "5",
                               "--out", str(out)])
    assert res.exit_code == 0
    assert out.read_text().count('class="mark"') == 60


def test_stim_with_palette(runner, evidence_arg, tmp_path):
    res = runner.invoke(main, ["generate", "--type", "redundant", "--n", "3",
                               "--k", "1", "--evidence", evidence_arg])
    pf = tmp_path / "p.json"
    top = json.loads(res.output)["palettes"][0]
    pf.write_text(json.dumps(top))
    res = runner.invoke(main, ["stim", "--n", "3", "--seed", "2",
                               "--palette-file", str(pf)])
    assert res.exit_code == 0
    assert top["entries"][0]["hex"] in res.output


def test_stim_engagement_limits(runner):
    assert runner.invoke(main, ["stim", "--n", "2", "--engagement"]).exit_code == 0
    assert runner.invoke(main, ["stim", "--n", "5", "--engagement"]).exit_code == 3
    assert runner.invoke(main, ["stim", "--n", "1"]).exit_code == 2


def test_plan_command(runner, tmp_path):
    res = runner.invoke(main, ["plan", "--experiment", "E2"])
    assert res.exit_code == 0
    assert len(json.loads(res.output)["designs"]) == 240
    out = tmp_path / "plan.json"
    res = runner.invoke(main, ["plan", "--experiment", "E4", "--out", str(out)])
    assert res.exit_code == 0
    assert "wrote 891 designs" in res.output
    assert runner.invoke(main, ["plan", "--experiment", "E5"]).exit_code == 2


def test_validate_command(runner, evidence_arg):
    res = runner.invoke(main, ["validate"])
    assert res.exit_code == 0
    assert "color pool: 39 entries ok" in res.output
    res = runner.invoke(main, ["validate", "--evidence", evidence_arg])
    assert res.exit_code == 0
    assert "matrix color/all" in res.output


def test_report_command(runner, tmp_path):
    log = _color_trial_log(tmp_path / "trials.txt")
    res = runner.invoke(main, ["report", "--trials", str(log),
                               "--samples-per-n", "40", "--repeats", "2"])
    assert res.exit_code == 0, res.output
    data = json.loads(res.output)
    assert -1.0 <= data["correlation"] <= 1.0
    assert len(data["per_rank_mean"]) == 40


def test_report_insufficient_palettes(runner, tmp_path):
    log = _color_trial_log(tmp_path / "trials.txt", n_palettes=5)
    res = runner.invoke(main, ["report", "--trials", str(log)])
    assert res.exit_code == 3
    assert "insufficient" in res.stderr
