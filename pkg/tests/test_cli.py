import csv
import importlib
import io
import json
import math
import subprocess
import sys

import pytest

from noisyqpu.bench import JssInstance, jss_dense_pubo
from noisyqpu.cli import main
from noisyqpu.cli.config import ExperimentConfig, parse_config_text
from noisyqpu.cli.main import verify_record
from noisyqpu.cli.sweep import COLUMNS, SweepSpec, rows_to_csv, run_sweep, scale_factor
from noisyqpu.errors import ValidationError
from noisyqpu.noise import synthetic_snapshot


def read(path):
    return json.loads(path.read_text())


@pytest.fixture
def snapshot_file(tmp_path):
    path = tmp_path / "snap.json"
    assert main(["device", "generate", "--qubits", "3", "--f2q", "0.97", "--readout", "0.03", "-o", str(path)]) == 0
    return path


def test_device_generate_and_inspect(snapshot_file, capsys):
    assert main(["device", "inspect", str(snapshot_file)]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["num_qubits"] == 3 and report["ecr_error"]["median"] == pytest.approx(0.03)


def test_scale_zero_half_decades_is_identical(snapshot_file, tmp_path):
    out = tmp_path / "same.json"
    assert main(["device", "scale", str(snapshot_file), "--half-decades", "0", "-o", str(out)]) == 0
    assert read(out) == read(snapshot_file)


def test_scale_two_half_decades(snapshot_file, tmp_path):
    out = tmp_path / "scaled.json"
    assert main(["device", "scale", str(snapshot_file), "--half-decades", "2", "-o", str(out)]) == 0
    data = read(out)
    assert data["qubits"][0]["readout_e0"] == pytest.approx(0.003, abs=1e-15)
    ecr = [g for g in data["gates"] if g["name"] == "ecr"][0]
    assert ecr["fidelity"] == pytest.approx(0.997, abs=1e-15)


def test_median(tmp_path):
    src, out = tmp_path / "spread.json", tmp_path / "median.json"
    main(["device", "generate", "--qubits", "3", "--spread", "0.4", "--seed", "3", "-o", str(src)])
    assert main(["device", "median", str(src), "-o", str(out)]) == 0
    qubits = read(out)["qubits"]
    assert all(q == qubits[0] for q in qubits)


def test_bench_outputs(tmp_path):
    assert main(["bench", "qaoa-jss", "--jobs", "4", "--machines", "2", "--encoding", "dense", "--depth", "8",
                 "-o", str(tmp_path / "q")]) == 0
    assert read(tmp_path / "q" / "circuit.json")["num_qubits"] == 4
    assert read(tmp_path / "q" / "problem.json")["n"] == 4
    assert main(["bench", "ghz", "--triplets", "0,1,2", "-o", str(tmp_path / "g")]) == 0
    assert read(tmp_path / "g" / "circuit.json")["num_qubits"] == 3
    assert main(["bench", "idle-t1", "--t", "1e-5", "-o", str(tmp_path / "i")]) == 0
    gates = [g["gate"] for g in read(tmp_path / "i" / "circuit.json")["instructions"]]
    assert gates == ["x", "delay", "measure"]


def test_run_writes_record_and_is_deterministic(tmp_path):
    main(["bench", "ghz", "--triplets", "0,1,2", "-o", str(tmp_path / "g")])
    runs = []
    for name in ("a", "b"):
        out = tmp_path / name
        assert main(["run", "--circuit", str(tmp_path / "g" / "circuit.json"), "--seed", "5", "-o", str(out)]) == 0
        for f in ("config.json", "circuit.json", "counts.json", "record.json"):
            assert (out / f).is_file()
        assert verify_record(out)
        rec = read(out / "record.json")
        rec.pop("wall_clock_s")
        runs.append(rec)
    assert runs[0] == runs[1]


def test_run_ideal_ghz(tmp_path):
    main(["bench", "ghz", "--triplets", "0,1,2", "-o", str(tmp_path / "g")])
    out = tmp_path / "r"
    main(["run", "--circuit", str(tmp_path / "g" / "circuit.json"), "--ideal", "-o", str(out)])
    probs = {k: v for k, v in read(out / "distribution.json")["probabilities"].items() if v > 1e-12}
    assert probs == pytest.approx({"000": 0.5, "111": 0.5}, abs=1e-12)


def test_run_idle_decoherence_only(tmp_path):
    main(["bench", "idle-t1", "--t", "1e-5", "-o", str(tmp_path / "i")])
    out = tmp_path / "r"
    assert main(["run", "--circuit", str(tmp_path / "i" / "circuit.json"), "--no-init", "--no-depolarizing",
                 "--no-readout", "-o", str(out)]) == 0
    assert read(out / "distribution.json")["probabilities"]["1"] == pytest.approx(math.exp(-1), abs=1e-9)


def test_run_with_fit_and_tampered_record(tmp_path):
    q = tmp_path / "q"
    main(["bench", "qaoa-jss", "--durations", "1,1,2,2", "--depth", "2", "--delta-gamma", "0.1", "-o", str(q)])
    out = tmp_path / "r"
    assert main(["run", "--circuit", str(q / "circuit.json"), "--pubo", str(q / "pubo.json"), "-o", str(out)]) == 0
    fit = read(out / "fit.json")
    assert fit["model"] == "zeta-delta" and 0 < fit["p_tilde"] < 1
    rec = read(out / "record.json")
    rec["stats"]["two_qubit_gates"] += 1
    (out / "record.json").write_text(json.dumps(rec))
    assert not verify_record(out)


def test_fit_command(tmp_path, capsys):
    (tmp_path / "pubo.json").write_text(json.dumps({"n": 1, "terms": [{"vars": [0], "coeff": 1.0}]}))
    (tmp_path / "counts.json").write_text(json.dumps({"counts": {"0": 75, "1": 25}}))
    assert main(["fit", str(tmp_path / "counts.json"), str(tmp_path / "pubo.json"), "--model", "zeta"]) == 0
    assert json.loads(capsys.readouterr().out)["zeta"] == pytest.approx(math.log(3), abs=1e-9)


def test_metrics_command(tmp_path, capsys):
    (tmp_path / "p.json").write_text(json.dumps({"probabilities": {"0": 0.5, "1": 0.5}}))
    (tmp_path / "q.json").write_text(json.dumps({"probabilities": {"0": 1.0}}))
    assert main(["metrics", str(tmp_path / "p.json"), str(tmp_path / "q.json")]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["hellinger"] == pytest.approx(0.54120, abs=1e-5)
    assert report["kullback_leibler"] is None and report["kullback_leibler_infinite"]
    (tmp_path / "r.json").write_text(json.dumps({"probabilities": {"00": 1.0}}))
    assert main(["metrics", str(tmp_path / "p.json"), str(tmp_path / "r.json")]) == 2


def test_validation_exit_codes(tmp_path):
    assert main(["bench", "ghz", "--triplets", "0,1,2;2,3,4", "-o", str(tmp_path / "x")]) == 2
    assert main(["run", "--circuit", str(tmp_path / "missing.json")]) == 2
    assert main(["device", "inspect"]) == 2


def test_numerical_exit_code(tmp_path, monkeypatch):
    main_mod = importlib.import_module("noisyqpu.cli.main")
    from noisyqpu.errors import NonConvergence

    def boom(*_a, **_k):
        raise NonConvergence("no")

    monkeypatch.setattr(main_mod, "_run_fit", boom)
    (tmp_path / "pubo.json").write_text(json.dumps({"n": 1, "terms": [{"vars": [0], "coeff": 1.0}]}))
    (tmp_path / "counts.json").write_text(json.dumps({"counts": {"0": 3, "1": 1}}))
    assert main(["fit", str(tmp_path / "counts.json"), str(tmp_path / "pubo.json")]) == 3


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "noisyqpu", "bench", "ghz", "--triplets", "0,0,1",
                           "-o", str(tmp_path / "x")], capture_output=True, text=True)
    assert proc.returncode == 2 and "error" in proc.stderr


def test_config_file_and_flag_precedence(tmp_path):
    main(["bench", "ghz", "--triplets", "0,1,2", "-o", str(tmp_path / "g")])
    cfg = tmp_path / "run.cfg"
    cfg.write_text(f"[run]\ncircuit = {tmp_path / 'g' / 'circuit.json'}\nshots = 100\nseed = 4\n")
    assert main(["--config", str(cfg), "run", "--circuit", str(tmp_path / "g" / "circuit.json"),
                 "--shots", "50", "-o", str(tmp_path / "r")]) == 0
    conf = read(tmp_path / "r" / "config.json")
    assert conf["shots"] == 50 and conf["seed"] == 4
    cfg.write_text("bogus_key = 1\n")
    assert main(["--config", str(cfg), "run", "--circuit", "x.json"]) == 2


def test_parse_config_text():
    assert parse_config_text("# c\n[s]\nshots = 10\nfit-model = zeta\nideal = true\n") == {
        "shots": 10, "fit_model": "zeta", "ideal": True}
    with pytest.raises(ValidationError):
        parse_config_text("no equals sign")


def test_config_digest_is_stable(tmp_path):
    path = tmp_path / "c.json"
    path.write_text("{}")
    a, b = ExperimentConfig(str(path), seed=1), ExperimentConfig(str(path), seed=1)
    assert a.digest() == b.digest() != ExperimentConfig(str(path), seed=2).digest()
    with pytest.raises(ValidationError):
        ExperimentConfig(str(path), shots=0)


def test_sweep_factor_zero_gives_unit_gain():
    energy = jss_dense_pubo(JssInstance((1, 1)))
    spec = SweepSpec("depth", (1, 2), energy, synthetic_snapshot(2), half_decades=math.inf, delta_gamma=0.1)
    rows = run_sweep(spec)
    assert scale_factor(math.inf) == 0
    assert all(r["gain_ratio"] == pytest.approx(1.0, abs=1e-6) for r in rows)


def test_fidelity_sweep_monotone():
    energy = jss_dense_pubo(JssInstance((1, 1, 2, 2)))
    spec = SweepSpec("fidelity", (0, 1, 2), energy, synthetic_snapshot(4), depth=2, delta_gamma=0.1)
    p = [r["p_tilde_noisy"] for r in run_sweep(spec, workers=2)]
    assert p == sorted(p)


def test_empty_sweep_has_header_only(tmp_path):
    assert main(["sweep", "depth", "--points", "", "--durations", "1,1", "-o", str(tmp_path)]) == 0
    assert (tmp_path / "sweep.csv").read_text() == ",".join(COLUMNS) + "\n"


def test_sweep_rows_survive_failures():
    energy = jss_dense_pubo(JssInstance((1, 1)))
    # ideal p_tilde at zero ramps equals the uniform baseline, so the gain ratio is undefined
    spec = SweepSpec("depth", (1, 2), energy, synthetic_snapshot(2), delta_beta=0.0, delta_gamma=0.0)
    rows = list(csv.DictReader(io.StringIO(rows_to_csv(run_sweep(spec)))))
    assert len(rows) == 2 and all("DenominatorNonpositive" in r["error"] for r in rows)
