import json
from pathlib import Path

import numpy as np
import pytest

from baldwin.chains import InvalidParameterError, ModelParams
from baldwin.cli import main, run_preset
from baldwin.experiment import run_experiment
from baldwin.presets import PRESETS, ConfigError, get_preset, parse_assignment, parse_config

SMALL = ["--set", "N=20", "--set", "n=10", "--set", "p_m=0.05", "--generations", "6",
         "--replicates", "3", "--threads", "1"]


def write(tmp_path, name, obj):
    path = tmp_path / name
    path.write_text(json.dumps(obj))
    return path


def test_empty_config_uses_recommended(tmp_path):
    p = parse_config(write(tmp_path, "c.json", {"chain_length": 100}))
    assert (p.population_size, p.mutation_prob, p.selection_intensity) == (100, 0.01, 1.0)
    p = parse_config(write(tmp_path, "d.json", {"N": 40}))
    assert (p.population_size, p.mutation_prob) == (40, 1 / 40)


def test_config_weak_learning(tmp_path):
    p = parse_config(write(tmp_path, "c.json", {"learning_prob": 0.5}))
    assert p == get_preset("fig5_weak_learning").params.replace(
        generations=p.generations, replicates=p.replicates)


def test_config_errors_name_the_key(tmp_path):
    with pytest.raises(ConfigError, match="mutation_prob"):
        parse_config(write(tmp_path, "c.json", {"mutation_prob": 1.5}))
    with pytest.raises(ConfigError, match="bogus"):
        parse_config(write(tmp_path, "d.json", {"bogus": 1}))
    with pytest.raises(ConfigError):
        parse_config(write(tmp_path, "e.json", {"N": 10, "chain_length": 10}))
    bad = tmp_path / "f.json"
    bad.write_text("{not json")
    with pytest.raises(ConfigError):
        parse_config(bad)


def test_overrides_beat_file(tmp_path):
    p = parse_config(write(tmp_path, "c.json", {"generations": 10}), {"generations": 20})
    assert p.generations == 20


def test_parse_assignment():
    assert parse_assignment("p_l=0.5") == ("p_l", 0.5)
    assert parse_assignment("fitness_variant=load") == ("fitness_variant", "load")
    assert parse_assignment("learning_enabled=false") == ("learning_enabled", False)
    with pytest.raises(ConfigError):
        parse_assignment("nothing")


def test_presets_share_the_main_regime():
    names = {"fig1_learning", "fig1_pure", "fig2", "fig3", "fig4", "fig5_weak_learning",
             "fig6_turnoff", "fig7_load", "fig8", "fig9", "fig10_hinton", "fig11_hinton_load",
             "appendix_deterministic"}
    assert names <= set(PRESETS)
    for preset in PRESETS.values():
        p = preset.params
        assert (p.chain_length, p.population_size, p.selection_intensity) == (100, 100, 1.0)
        assert (p.mutation_prob, p.noise_floor, p.lifetime) == (0.01, 1e-6, 2)
        assert p.learning_prob == (0.5 if preset.name == "fig5_weak_learning" else 1.0)
        if "load" in p.fitness_variant:
            assert p.load_coefficient == 1.0
    with pytest.raises(InvalidParameterError, match="fig1_learning"):
        get_preset("fig99")


def test_run_writes_files(tmp_path, capsys):
    assert main(["run", "fig2", "--out", str(tmp_path), *SMALL[:-4], "--replicates", "3"]) == 0
    series = (tmp_path / "fig2_series.csv").read_text().splitlines()
    assert series[0] == "generation,mean_rho_begin,mean_rho_end,stderr_begin,stderr_end"
    assert len(series) == 6 + 1
    dist = (tmp_path / "fig2_dist_G1.csv").read_text().splitlines()
    assert dist[0] == "rho,curve1,curve2,curve3,curve4"
    assert len(dist) == 20 + 2
    meta = json.loads((tmp_path / "fig2_meta.json").read_text())
    assert meta["replicate_count"] == 3 and meta["params"]["chain_length"] == 20
    assert meta["estimate"]["total_generations"] == pytest.approx(40.0)
    assert "wall_time_seconds" in meta and "base_seed" in meta


def test_identical_runs_are_byte_identical(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for out in (a, b):
        assert main(["run", "fig4", "--out", str(out), "--snapshots", "6", *SMALL]) == 0
    for name in ("fig4_series.csv", "fig4_dist_G6.csv"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_meta_round_trip(tmp_path):
    out = tmp_path / "first"
    assert main(["run", "fig1_learning", "--out", str(out), "--seed", "11", *SMALL]) == 0
    meta = out / "fig1_learning_meta.json"
    again = tmp_path / "second"
    assert main(["run", "--config", str(meta), "--out", str(again), "--threads", "1"]) == 0
    assert ((out / "fig1_learning_series.csv").read_bytes()
            == (again / "fig1_learning_series.csv").read_bytes())
    p = parse_config(meta)
    r1 = run_experiment(p)
    assert np.array_equal(r1.begin_totals, run_experiment(p).begin_totals)


def test_run_preset_function(tmp_path):
    overrides = {"N": 20, "n": 10, "p_m": 0.05, "G": 4, "R": 2}
    assert run_preset("fig9", overrides, tmp_path) == 0
    assert (tmp_path / "fig9_series.csv").exists()
    assert run_preset("nope", None, tmp_path) == 1


def test_exit_codes(tmp_path, capsys):
    assert main(["list-presets"]) == 0
    assert "fig1_learning" in capsys.readouterr().out
    assert main([]) == 1
    assert main(["run"]) == 1
    assert main(["run", "fig99"]) == 1
    assert main(["run", "fig2", "--set", "mutation_prob=2"]) == 1
    assert main(["run", "--config", str(tmp_path / "missing.json")]) == 1
    assert main(["estimate"]) == 1
    blocker = tmp_path / "file"
    blocker.write_text("x")
    assert main(["run", "fig2", "--out", str(blocker / "sub"), *SMALL]) == 2


def test_estimate_command(capsys):
    assert main(["estimate", "--n-length", "100", "--json"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["total_generations"] == pytest.approx(200)
    assert data["total_organisms"] == pytest.approx(20000)
    assert main(["estimate", "--n-length", "10", "--json"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["total_generations"] == pytest.approx(20)
    assert data["total_organisms"] == pytest.approx(200)
    assert main(["estimate", "--n-length", "100"]) == 0
    assert "G_T" in capsys.readouterr().out
    assert main(["estimate", "--n-length", "0"]) == 1
