import csv
import json

import pytest

from hypergrowth.cli import main
from hypergrowth.config import RunConfig, config_from_mapping, load_config
from hypergrowth.engine import MaxTime, TargetNodeCount
from hypergrowth.errors import InvalidArgument
from hypergrowth.stochastic import ConstantBatch, DiscreteUniform, ExponentialAttractiveness, TablePmf

SMALL = ["--nodes", "400", "-q"]


def read_csv(path):
    with open(path) as fh:
        return list(csv.DictReader(fh))


def test_config_defaults_and_toml(tmp_path):
    assert load_config(None).params.batch == DiscreteUniform(1, 5)
    f = tmp_path / "run.toml"
    f.write_text(
        'nodes = 5000\nalpha = 0.9\nreplicas = 2\n'
        'batch = {kind = "table", values = [1, 3], probs = [0.25, 0.75]}\n'
        'attractiveness = {kind = "exponential", rate = 2.0}\n'
    )
    cfg = load_config(f)
    assert cfg.params.stop == TargetNodeCount(5000)
    assert cfg.params.alpha == 0.9 and cfg.replicas == 2
    assert cfg.params.batch == TablePmf((1, 3), (0.25, 0.75))
    assert cfg.params.attractiveness == ExponentialAttractiveness(2.0)
    # command-line overrides win over the file
    assert load_config(f, {"alpha": 0.5, "seed": None}).params.alpha == 0.5


@pytest.mark.parametrize("data", [
    {"node": 100},
    {"nodes": 100, "max_time": 5.0},
    {"m": 2.5},
    {"replicas": 0},
    {"batch": {"kind": "poisson", "mean": 3}},
    {"export_edges": "yes"},
    {"m0": 5},
])
def test_config_rejects(data):
    with pytest.raises(InvalidArgument):
        config_from_mapping(data)


def test_config_max_time_and_hash():
    cfg = config_from_mapping({"max_time": 50, "batch": {"kind": "constant", "n": 2}})
    assert cfg.params.stop == MaxTime(50.0) and cfg.params.batch == ConstantBatch(2)
    assert cfg.hash() == config_from_mapping({"batch": {"kind": "constant", "n": 2}, "max_time": 50.0}).hash()
    assert cfg.hash() != RunConfig().hash()


def test_simulate_bundle(tmp_path):
    out = tmp_path / "sim"
    assert main(["simulate", "--out", str(out), "--replicas", "2", *SMALL]) == 0
    man = json.loads((out / "manifest.json").read_text())
    assert man["command"] == "simulate" and man["seed"] == 20160101
    assert man["config"]["replicas"] == 2 and len(man["config_hash"]) == 64
    assert {"edges_r0.tsv", "edges_r1.tsv", "hyperdegrees.csv", "distribution.csv", "logbinned.csv"} <= set(man["files"])
    rows = read_csv(out / "distribution.csv")
    assert int(rows[0]["k"]) == 2
    assert sum(int(r["count"]) for r in rows) == man["summary"]["nodes"]


def test_simulate_is_byte_deterministic(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for d in (a, b):
        assert main(["simulate", "--out", str(d), "--seed", "3", *SMALL]) == 0
    for name in ("edges_r0.tsv", "distribution.csv", "manifest.json"):
        assert (a / name).read_bytes() == (b / name).read_bytes()
    c = tmp_path / "c"
    main(["simulate", "--out", str(c), "--seed", "4", *SMALL])
    assert (a / "edges_r0.tsv").read_bytes() != (c / "edges_r0.tsv").read_bytes()


def test_theory_outputs(tmp_path):
    out = tmp_path / "th"
    assert main(["theory", "--out", str(out), "--paper-form", "-q"]) == 0
    info = json.loads((out / "theory.json").read_text())
    assert info["theta"] == pytest.approx(10.039508605976935, rel=1e-10)
    assert abs(info["printed_form_residual"]) < 1e-8
    rows = read_csv(out / "theory.csv")
    assert float(rows[0]["pk_theory"]) == 0.0 and float(rows[0]["ccdf_theory"]) == 1.0


def test_theory_forced_exponent(tmp_path):
    cfg = tmp_path / "c.toml"
    cfg.write_text('m = 1\nm2 = 1\nm0 = 1\nnodes = 10\nbatch = {kind = "constant", n = 1}\n'
                   'attractiveness = {kind = "constant", y = 0.0}\n')
    out = tmp_path / "th"
    assert main(["theory", "--config", str(cfg), "--out", str(out), "--force-g", "2", "-q"]) == 0
    rows = {float(r["k"]): r for r in read_csv(out / "theory.csv")}
    assert float(rows[2.0]["pk_theory"]) == pytest.approx(0.384)
    assert float(rows[2.0]["ccdf_theory"]) == pytest.approx(0.64)


def test_exit_codes(tmp_path, capsys):
    assert main(["theory", "--alpha", "0.9", "--out", str(tmp_path / "t"), "-q"]) == 2
    assert "1/2" in capsys.readouterr().err
    assert not (tmp_path / "t").exists()
    assert main(["simulate", "--m2", "0", "--out", str(tmp_path / "s"), "-q"]) == 2
    assert not (tmp_path / "s").exists()
    bad = tmp_path / "bad.toml"
    bad.write_text("nodes = [")
    assert main(["simulate", "--config", str(bad), "-q"]) == 2
    assert main(["simulate", "--config", str(tmp_path / "missing.toml"), "-q"]) == 2


def test_compare_writes_fit_report(tmp_path):
    out = tmp_path / "cmp"
    assert main(["compare", "--out", str(out), "--nodes", "3000", "-q"]) == 0
    fit = json.loads((out / "fit.json").read_text())
    assert 0 <= fit["ks_distance"] <= 1 and isinstance(fit["ks_pass"], bool)
    assert fit["theory"]["g"] == pytest.approx(2.5098771514942339)
    for name in ("compare.csv", "logbin_compare.csv", "theory.csv", "plot_compare.py"):
        assert (out / name).exists()


def test_compare_without_theory(tmp_path):
    out = tmp_path / "cmp"
    assert main(["compare", "--out", str(out), "--alpha", "0.9", *SMALL]) == 0
    assert json.loads((out / "fit.json").read_text())["theory"] is None
    assert not (out / "compare.csv").exists()


def test_sweep_alpha(tmp_path):
    out = tmp_path / "sw"
    assert main(["sweep-alpha", "--out", str(out), "--nodes", "3000", "--alphas", "0.1", "0.9", "-q"]) == 0
    rows = read_csv(out / "tail_fits.csv")
    assert [float(r["alpha"]) for r in rows] == [0.1, 0.9]
    assert all(r["status"] == "ok" for r in rows)
    assert (out / "alpha_0.1" / "distribution.csv").exists()
