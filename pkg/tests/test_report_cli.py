"""Report pipeline, cache behavior, and exit codes through the CLI."""
import json
import subprocess
import sys

import pytest

from polytoep.poly import exact_poly, symbols, tuple_to_json
from polytoep.report import JobConfig, cache_key, load_tuple, run_index, run_spectrum

from conftest import p2


def body_bytes(report):
    return json.dumps(report["body"], sort_keys=True).encode()


def test_agree_report_shape(shift_pair):
    rep = run_index(JobConfig(input=shift_pair))
    body = rep["body"]
    assert body["schema_version"] == "1"
    v = body["verdict"]
    assert v["kind"] == "agree" and v["index"] == -1
    assert set(v["routes"]) == {"koszul", "algebraic", "oracle", "tensor"}
    assert body["certificate"]["verdict"] == "certified"
    assert all(body["routes"][r]["index"] == -1 for r in v["routes"])
    assert rep["cache"]["hit"] is False
    assert rep["timings"]["total"] > 0


def test_not_fredholm_report(repeated_pair):
    rep = run_index(JobConfig(input=repeated_pair))
    v = rep["body"]["verdict"]
    assert v["kind"] == "not_fredholm"
    assert float(v["witness_value"]) < 1e-3
    assert rep["body"]["routes"] == {}


def test_gcd_reduction_is_reported():
    g = p2({(1, 0): 1, (0, 0): -2})
    st = symbols(2, g * p2({(1, 0): 1}), g * p2({(0, 1): 1, (0, 0): "-1/2"}))
    rep = run_index(JobConfig(input=st))
    red = rep["body"]["reduction"]
    assert red["common_factor"] is not None and red["factor_zero_free"]
    assert rep["body"]["verdict"]["index"] == -1


def test_input_forms_agree(shift_pair, tmp_path):
    as_dict = tuple_to_json(shift_pair)
    path = tmp_path / "t.json"
    path.write_text(json.dumps(as_dict))
    reps = [run_index(JobConfig(input=src)) for src in (shift_pair, as_dict, str(path))]
    assert len({body_bytes(r) for r in reps}) == 1


def test_parse_error_carries_position(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"nvars": 2,,}')
    with pytest.raises(ValueError, match="line 1"):
        load_tuple(str(bad))


def test_repeat_runs_byte_identical(quarter_pair):
    a = run_index(JobConfig(input=quarter_pair, seed=5))
    b = run_index(JobConfig(input=quarter_pair, seed=5))
    assert body_bytes(a) == body_bytes(b)


def test_cache_roundtrip_and_corruption(shift_pair, tmp_path, capsys):
    cfg = JobConfig(input=shift_pair, cache_dir=str(tmp_path))
    first = run_index(cfg)
    assert not first["cache"]["hit"]
    second = run_index(cfg)
    assert second["cache"]["hit"]
    assert body_bytes(first) == body_bytes(second)
    # corrupt entry: warn on stderr, recompute, rewrite
    entry = tmp_path / f"{first['cache']['key']}.json"
    entry.write_text("{oops")
    third = run_index(cfg)
    err = capsys.readouterr().err
    assert "corrupt cache entry" in err
    assert not third["cache"]["hit"]
    assert body_bytes(third) == body_bytes(first)
    assert run_index(cfg)["cache"]["hit"]


def test_cache_key_canonicalization(shift_pair, z1, z2):
    reordered = symbols(2, p2({(0, 0): 0}) + z1, z2)
    assert cache_key(JobConfig(input=shift_pair), shift_pair) == \
        cache_key(JobConfig(input=reordered), reordered)
    assert cache_key(JobConfig(input=shift_pair), shift_pair) != \
        cache_key(JobConfig(input=shift_pair, seed=1), shift_pair)
    assert cache_key(JobConfig(input=shift_pair), shift_pair) != \
        cache_key(JobConfig(input=shift_pair, command="spectrum"), shift_pair)


def test_spectrum_membership_and_cloud(shift_pair):
    rep = run_spectrum(JobConfig(input=shift_pair, command="spectrum", lam=(0, 0)))
    assert rep["body"]["verdict"] == "outside"
    assert float(rep["body"]["distance_estimate"]) > 0.1
    csv1 = run_spectrum(JobConfig(input=shift_pair, command="spectrum", resolution=6))
    csv2 = run_spectrum(JobConfig(input=shift_pair, command="spectrum", resolution=6))
    assert csv1 == csv2
    assert csv1.splitlines()[0] == "re1,im1,re2,im2"


def test_job_config_validation(shift_pair):
    with pytest.raises(ValueError):
        JobConfig(input=shift_pair, command="bogus")
    with pytest.raises(ValueError):
        JobConfig(input=shift_pair, r_schedule=(0.5, 1.5))
    with pytest.raises(ValueError):
        JobConfig(input=shift_pair, rank_tolerance=0.0)


# -- CLI ------------------------------------------------------------------------


def cli(*args, cwd=None):
    proc = subprocess.run([sys.executable, "-m", "polytoep.cli", *args],
                          capture_output=True, text=True, cwd=cwd)
    return proc.returncode, proc.stdout, proc.stderr


@pytest.fixture
def inputs(tmp_path):
    z1 = p2({(1, 0): 1})
    z2 = p2({(0, 1): 1})
    files = {}
    for name, st in [
        ("shifts", symbols(2, z1, z2)),
        ("repeated", symbols(2, z1, z1)),
    ]:
        path = tmp_path / f"{name}.json"
        path.write_text(json.dumps(tuple_to_json(st)))
        files[name] = str(path)
    broken = tmp_path / "broken.json"
    broken.write_text('{"nvars":')
    files["broken"] = str(broken)
    files["dir"] = tmp_path
    return files


def test_cli_index_exit_codes(inputs):
    code, out, _ = cli("index", "--input", inputs["shifts"])
    assert code == 0
    assert json.loads(out)["body"]["verdict"]["index"] == -1
    code, out, _ = cli("index", "--input", inputs["repeated"])
    assert code == 2
    code, _, err = cli("index", "--input", inputs["broken"])
    assert code == 1 and "line" in err
    code, _, err = cli("index", "--input", str(inputs["dir"] / "missing.json"))
    assert code == 1


def test_cli_usage_errors(inputs):
    assert cli()[0] == 1                       # missing subcommand
    assert cli("index")[0] == 1                # missing --input
    assert cli("index", "--input", inputs["shifts"], "--n-range", "17")[0] == 1


def test_cli_certify_and_spectrum(inputs):
    code, out, _ = cli("certify", "--input", inputs["shifts"], "--r", "0.5")
    assert code == 0 and json.loads(out)["certificate"]["verdict"] == "certified"
    code, out, _ = cli("certify", "--input", inputs["repeated"], "--r", "0.5")
    assert code == 2
    code, out, _ = cli("spectrum", "--input", inputs["shifts"], "--lambda", "0,0", "0,0")
    assert code == 0 and json.loads(out)["body"]["verdict"] == "outside"
    code, out, _ = cli("spectrum", "--input", inputs["shifts"], "--resolution", "6")
    assert code == 0 and out.startswith("re1,im1")


def test_cli_koszul_dims_and_dump(inputs):
    code, out, _ = cli("koszul-dims", "--input", inputs["shifts"],
                       "--n-range", "2..6", "--dump-matrices")
    assert code == 0
    payload = json.loads(out)
    assert payload["index"] == -1 and payload["stabilized"]
    dumped = inputs["dir"] / "shifts.matrices.txt"
    assert dumped.exists() and dumped.read_text().startswith("# d1 shape")
    # too few levels to stabilize
    code, out, _ = cli("koszul-dims", "--input", inputs["shifts"], "--n-range", "2..3")
    assert code == 3


def test_cli_tensor(inputs, tmp_path):
    factors_file = tmp_path / "tensor.json"
    factors_file.write_text(json.dumps({
        "factors": [{"fourier": [{"k": 2, "re": 1.0, "im": 0.0}]},
                    {"fourier": [{"k": 3, "re": 1.0, "im": 0.0}]}],
        "variables": [0, 1]}))
    code, out, _ = cli("tensor", "--input", str(factors_file))
    assert code == 0 and json.loads(out)["tuple_index"] == -6


def test_cli_config_file_merge(inputs, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"seed": 9, "r_schedule": [0.5]}))
    code, out, _ = cli("index", "--input", inputs["shifts"], "--config", str(cfg))
    assert code == 0
    body = json.loads(out)["body"]
    assert body["config"]["seed"] == 9
    assert body["config"]["r_schedule"] == [0.5]
    # explicit flag wins over the file
    code, out, _ = cli("index", "--input", inputs["shifts"],
                       "--config", str(cfg), "--seed", "4")
    assert json.loads(out)["body"]["config"]["seed"] == 4
