import csv
import json
from pathlib import Path

import pytest
import yaml

from modelspace.errors import ConfigError
from modelspace.lab_cli import HEADERS, ExperimentConfig, main, run

CONFIGS = Path(__file__).resolve().parents[1] / "configs"

SMALL_APPROX = {
    "kind": "APPROX_KERNEL",
    "seed": 0,
    "theta": {"measure": {"atoms": [[0.0, 1.0]]}},
    "lambda": 0.4,
    "n_list": [2, 4],
    "grid": {"N": 4096},
}


def write(tmp_path, cfg, name="cfg.yaml"):
    p = tmp_path / name
    p.write_text(yaml.safe_dump(cfg))
    return p


def read_table(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def test_entropy_run_writes_table_and_manifest(tmp_path):
    out = tmp_path / "out"
    assert main(["--config", str(CONFIGS / "entropy.yaml"), "--out", str(out)]) == 0
    rows = read_table(out / "results.csv")
    assert rows[0] == HEADERS["ENTROPY"]
    names = [r[0] for r in rows[1:]]
    assert names == ["single_point", "antipodal_pair", "middle_thirds", "polylog_beta2", "polylog_beta1"]
    last = dict(zip(rows[0], rows[-1]))
    assert last["entropy"] == "inf" and last["is_bc"] == "false"
    manifest = yaml.safe_load((out / "manifest.yaml").read_text())
    assert manifest["kind"] == "ENTROPY" and "results.csv" in manifest["files"]
    assert "timing_seconds" not in manifest


def test_deterministic_reruns_are_byte_identical(tmp_path):
    for name in ("decompose.yaml", "pairing_check.yaml"):
        a, b = tmp_path / (name + "a"), tmp_path / (name + "b")
        assert main(["--config", str(CONFIGS / name), "--out", str(a)]) == 0
        assert main(["--config", str(CONFIGS / name), "--out", str(b)]) == 0
        files = sorted(p.name for p in a.iterdir())
        assert files == sorted(p.name for p in b.iterdir())
        for f in files:
            assert (a / f).read_bytes() == (b / f).read_bytes()


def test_seed_override_changes_pairing_inputs(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    cfg = CONFIGS / "pairing_check.yaml"
    assert main(["--config", str(cfg), "--out", str(a), "--seed", "1"]) == 0
    assert main(["--config", str(cfg), "--out", str(b), "--seed", "2"]) == 0
    assert (a / "results.csv").read_bytes() != (b / "results.csv").read_bytes()


def test_verify_adds_selfconvergence_column(tmp_path):
    out = tmp_path / "out"
    p = write(tmp_path, SMALL_APPROX)
    assert main(["--config", str(p), "--out", str(out), "--verify"]) == 0
    rows = read_table(out / "results.csv")
    assert rows[0] == HEADERS["APPROX_KERNEL"]
    assert all(r[-1] != "NA" for r in rows[1:])
    manifest = yaml.safe_load((out / "manifest.yaml").read_text())
    assert manifest["verify"] is True and "selfconv" in manifest["results"]


def test_empty_n_list_gives_header_only_table_and_warning(tmp_path):
    out = tmp_path / "out"
    p = write(tmp_path, dict(SMALL_APPROX, n_list=[]))
    assert main(["--config", str(p), "--out", str(out)]) == 0
    assert read_table(out / "results.csv") == [HEADERS["APPROX_KERNEL"]]
    manifest = yaml.safe_load((out / "manifest.yaml").read_text())
    assert any("n_list" in w for w in manifest["warnings"])


def test_grid_override(tmp_path):
    out = tmp_path / "out"
    p = write(tmp_path, dict(SMALL_APPROX, n_list=[2]))
    assert main(["--config", str(p), "--out", str(out), "--grid-override", "2048"]) == 0
    manifest = yaml.safe_load((out / "manifest.yaml").read_text())
    assert manifest["results"]["grid_N"] == 2048


def test_timing_is_opt_in(tmp_path):
    out = tmp_path / "out"
    assert main(["--config", str(CONFIGS / "decompose.yaml"), "--out", str(out), "--timing"]) == 0
    assert "timing_seconds" in yaml.safe_load((out / "manifest.yaml").read_text())


@pytest.mark.parametrize(
    "cfg",
    [
        {"kind": "NOPE"},
        {"seed": 0},
        dict(SMALL_APPROX, bogus=1),
        dict(SMALL_APPROX, grid={"N": 1000}),
        dict(SMALL_APPROX, **{"lambda": 1.5}),
        dict(SMALL_APPROX, n_list=[0]),
        {"kind": "ENTROPY", "sets": []},
        {"kind": "DECOMPOSE", "measure": {"atoms": [[0.1, -1.0]]}},
        {"kind": "CYCLICITY", "degrees": [5], "functions": [{"name": "a", "theta": {}}], "obstruction": {"function": "b", "J_list": [0]}},
        {"kind": "SMOOTHING_SUITE", "set": {"schedule": {"family": "GEOMETRIC", "param": 0.3}}},
    ],
)
def test_config_errors_exit_2_with_error_record(tmp_path, cfg, capsys):
    out = tmp_path / "out"
    p = write(tmp_path, cfg)
    assert main(["--config", str(p), "--out", str(out)]) == 2
    err = yaml.safe_load((out / "error.yaml").read_text())
    assert err["status"] == 2 and err["message"]
    assert json.loads(capsys.readouterr().err.strip().splitlines()[-1])["status"] == 2
    assert not (out / "results.csv").exists()


def test_missing_and_malformed_files_exit_2(tmp_path):
    assert main(["--config", str(tmp_path / "absent.yaml"), "--out", str(tmp_path / "o1")]) == 2
    bad = tmp_path / "bad.yaml"
    bad.write_text("kind: [unclosed")
    assert main(["--config", str(bad), "--out", str(tmp_path / "o2")]) == 2


def test_hypothesis_violation_exits_3(tmp_path):
    cfg = dict(
        SMALL_APPROX,
        theta={"measure": {"components": [{"mass": 0.3, "schedule": {"family": "POLYLOG", "param": 1.0}}]}},
    )
    out = tmp_path / "out"
    assert main(["--config", str(write(tmp_path, cfg)), "--out", str(out)]) == 3
    assert yaml.safe_load((out / "error.yaml").read_text())["status"] == 3


def test_config_object_roundtrip():
    cfg = ExperimentConfig.load(CONFIGS / "smoothing_suite.yaml", seed=5)
    assert cfg.kind == "SMOOTHING_SUITE" and cfg.seed == 5
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict(["not", "a", "mapping"])


def test_run_returns_tables_and_series():
    res = run(ExperimentConfig.load(CONFIGS / "smoothing_suite.yaml"))
    header, rows = res.tables["results.csv"]
    assert header == HEADERS["SMOOTHING_SUITE"] and len(rows) == 4
    assert res.series and not res.warnings
