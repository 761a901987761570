import copy
import csv
import json
import os

import pytest

from ahsp_sim.cli import (
    ConfigError,
    ExperimentConfig,
    compare,
    config_from_args,
    build_parser,
    main,
    run,
    write_report,
)


def base_config(**overrides):
    kwargs = dict(moduli=[4], generators=[2], algorithm="both", mode="exact", seed=1)
    kwargs.update(overrides)
    return ExperimentConfig(**kwargs)


# --- config ---------------------------------------------------------------

def test_config_roundtrip():
    cfg = base_config(mode="shots", shots=12, aux="random-mixed", threads=2)
    again = ExperimentConfig.from_dict(cfg.to_dict())
    assert again == cfg


@pytest.mark.parametrize("overrides", [
    {"moduli": []},
    {"moduli": [0]},
    {"algorithm": "quantum"},
    {"mode": "dance"},
    {"format": "yaml"},
    {"shots": -1},
    {"threads": 0},
])
def test_config_validation_rejects(overrides):
    with pytest.raises(ConfigError):
        base_config(**overrides).validate()


def test_parser_to_config():
    parser = build_parser()
    args = parser.parse_args([
        "--moduli", "2,4", "--generators", "1,2", "--mode", "shots",
        "--shots", "7", "--seed", "9", "--aux", "random-pure", "--relabel-f",
    ])
    cfg = config_from_args(args)
    assert cfg.moduli == [2, 4]
    assert cfg.generators == [1, 2]
    assert cfg.shots == 7
    assert cfg.relabel_f is True


def test_parser_random_generators_and_shots_zeroed_outside_shot_mode():
    parser = build_parser()
    args = parser.parse_args(["--moduli", "8", "--generators", "random"])
    cfg = config_from_args(args)
    assert cfg.generators == "random"
    assert cfg.shots == 0  # exact mode ignores the shot default


def test_bad_int_list():
    parser = build_parser()
    args = parser.parse_args(["--moduli", "2,x", "--generators", "1"])
    with pytest.raises(ConfigError):
        config_from_args(args)


# --- run modes ------------------------------------------------------------

def test_run_exact_both():
    report = run(base_config())
    std = {tuple(r["outcome"]): r["probability"] for r in report["exact"]["standard"]}
    assert std == pytest.approx({(0,): 0.5, (2,): 0.5}, abs=1e-9)
    iff = {tuple(r["outcome"]): r["probability"] for r in report["exact"]["init-free"]}
    assert iff == pytest.approx(std, abs=1e-9)
    assert report["comparison"]["exact_distributions_match"]
    assert report["instance"]["orthogonal_generators"] == [2]


def test_run_shots_zero_is_degenerate():
    report = run(base_config(mode="shots", shots=0))
    for alg in ("standard", "init-free"):
        assert report["shots"][alg]["count"] == 0
        assert "empirical" not in report["shots"][alg]
    assert "exact" in report


def test_run_shots_sections():
    report = run(base_config(mode="shots", shots=40, aux="random-mixed", seed=5))
    comp = report["comparison"]
    assert comp["oracle_calls_per_shot"] == {"standard": 1, "init-free": 2}
    assert comp["restoration_fidelity"]["init-free"]["min"] >= 1 - 1e-9
    emp = report["shots"]["standard"]["empirical"]
    assert {tuple(r["outcome"]) for r in emp} <= {(0,), (2,)}
    assert sum(r["count"] for r in emp) == 40


def test_run_is_reproducible():
    cfg = base_config(mode="shots", shots=25, aux="random-mixed", seed=11)
    a = run(copy.deepcopy(cfg))
    b = run(copy.deepcopy(cfg))
    a.pop("wall_clock_seconds")
    b.pop("wall_clock_seconds")
    assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)


def test_run_threads_match_serial():
    serial = run(base_config(mode="shots", shots=30, seed=13, threads=1,
                             algorithm="standard"))
    parallel = run(base_config(mode="shots", shots=30, seed=13, threads=4,
                               algorithm="standard"))
    assert serial["shots"] == parallel["shots"]


def test_run_channel_mode():
    report = run(base_config(mode="channel", algorithm="init-free",
                             aux="random-mixed", seed=3))
    assert report["channel"]["trace"] == pytest.approx(1.0, abs=1e-9)
    marg = {tuple(r["outcome"]): r["probability"] for r in report["channel"]["a_marginal"]}
    assert marg == pytest.approx({(0,): 0.5, (2,): 0.5}, abs=1e-9)


def test_run_recover_mode():
    report = run(ExperimentConfig(
        moduli=[2, 4], generators=[1, 2], algorithm="init-free",
        mode="recover", aux="random-mixed", seed=21,
    ))
    section = report["recover"]["init-free"]
    assert section["success"] is True
    assert section["recovered_generators"] == [1, 2]
    assert section["queries_used"] >= 1


def test_run_random_generators_seeded():
    a = run(base_config(moduli=[12], generators="random", seed=8))
    b = run(base_config(moduli=[12], generators="random", seed=8))
    assert a["instance"]["hidden_generators"] == b["instance"]["hidden_generators"]
    h = a["instance"]["hidden_generators"][0]
    assert 12 % h == 0


def test_generator_normalization_warns(capsys):
    report = run(base_config(moduli=[8], generators=[6]))
    assert report["instance"]["hidden_generators"] == [2]
    assert "normalized" in capsys.readouterr().err


def test_relabeled_function_same_distribution():
    plain = run(base_config(seed=2))
    relabeled = run(base_config(seed=2, relabel_f=True))
    assert plain["exact"]["standard"] == relabeled["exact"]["standard"]


def test_generator_count_mismatch():
    with pytest.raises(ConfigError):
        run(base_config(moduli=[2, 4], generators=[2]))


# --- report writing -------------------------------------------------------

def test_write_report_json_atomic(tmp_path):
    path = tmp_path / "report.json"
    report = run(base_config(output=str(path)))
    on_disk = json.loads(path.read_text())
    assert on_disk["exact"] == report["exact"]
    leftovers = [p for p in os.listdir(tmp_path) if p.endswith(".tmp")]
    assert leftovers == []


def test_write_report_csv(tmp_path):
    path = tmp_path / "report.csv"
    run(base_config(mode="shots", shots=10, seed=4,
                    output=str(path), format="csv"))
    with open(path, newline="") as handle:
        rows = list(csv.reader(handle))
    assert rows[0] == ["section", "algorithm", "outcome", "value"]
    sections = {r[0] for r in rows[1:]}
    assert sections == {"exact", "empirical"}
    exact_std = {r[2]: float(r[3]) for r in rows[1:]
                 if r[0] == "exact" and r[1] == "standard"}
    assert exact_std == pytest.approx({"0": 0.5, "2": 0.5}, abs=1e-9)


def test_compare_two_reports():
    std = run(base_config(algorithm="standard", mode="shots", shots=15, seed=6))
    iff = run(base_config(algorithm="init-free", mode="shots", shots=15, seed=6,
                          aux="random-pure"))
    summary = compare(std, iff)
    assert summary["exact_distributions_match"]
    assert summary["oracle_calls_per_shot"] == {"standard": 1, "init-free": 2}
    other = run(base_config(moduli=[8], generators=[2], algorithm="init-free"))
    with pytest.raises(ConfigError):
        compare(std, other)


# --- entry point and exit codes -------------------------------------------

def test_main_success_prints_json(tmp_path, capsys):
    code = main(["--moduli", "4", "--generators", "2"])
    assert code == 0
    out = json.loads(capsys.readouterr().out)
    assert out["instance"]["group_order"] == 4


def test_main_writes_file_quietly(tmp_path, capsys):
    path = tmp_path / "r.json"
    code = main(["--moduli", "4", "--generators", "2", "--output", str(path)])
    assert code == 0
    assert capsys.readouterr().out == ""
    assert path.exists()


def test_main_config_error_exit_1(capsys):
    assert main(["--moduli", "4,x", "--generators", "2"]) == 1
    assert "error" in capsys.readouterr().err


def test_main_cap_error_exit_2(monkeypatch, capsys):
    monkeypatch.setenv("AHSP_SIM_MAX_AMPLITUDES", "4")
    assert main(["--moduli", "16", "--generators", "4"]) == 2
    assert "cap" in capsys.readouterr().err
