import json
import math

import numpy as np
import pytest

from rwpnet.cli import EXIT_CONFIG, EXIT_OK, EXIT_VALIDATION, main
from rwpnet.cli.commands import cmd_connect, cmd_mu, cmd_pdf, cmd_simulate, preset_configs, thread_count
from rwpnet.cli.config import ConfigError, ExperimentConfig, expand_numbers
from rwpnet.cli.tables import ResultTable, fmt, read_csv
from rwpnet.geometry import Disk, Rectangle


def test_number_lists():
    assert expand_numbers("1, 2.5") == pytest.approx([1, 2.5])
    assert expand_numbers("lin:0:1:5") == pytest.approx([0, 0.25, 0.5, 0.75, 1])
    assert expand_numbers("log:1:100:3") == pytest.approx([1, 10, 100])
    assert expand_numbers("").size == 0


def test_config_round_trip_and_views():
    cfg = ExperimentConfig.from_mapping({"domain": {"shape": "disk", "R": "2.5"},
                                         "network": {"nodes": "10, 20", "receivers": "centre, 1:0.5"}})
    again = ExperimentConfig.from_text(cfg.to_ini())
    assert again.values == cfg.values
    assert isinstance(cfg.domain, Disk) and cfg.domain.R == 2.5
    assert cfg.node_counts == [10, 20]
    assert cfg.receivers() == [("centre", (0.0, 0.0)), ("1:0.5", (1.0, 0.5))]
    # no pause list: derived from the mobility parameters
    assert cfg.pause_probabilities() == [0.0]


def test_config_errors_carry_field_paths():
    with pytest.raises(ConfigError) as exc:
        ExperimentConfig.from_mapping({"channel": {"gamma": "2", "eta": "x"}, "bogus": {}, "run": {"colour": "red"}})
    paths = {p for p, _ in exc.value.problems}
    assert {"channel.gamma", "channel.eta", "bogus", "run.colour"} <= paths
    with pytest.raises(ConfigError) as exc:
        ExperimentConfig.from_mapping({"domain": {"shape": "disk"}, "network": {"receivers": "corner"}})
    assert exc.value.problems[0][0] == "network.receivers"
    with pytest.raises(ConfigError):
        ExperimentConfig.from_mapping({"domain": {"a": "0.5"}})


def test_table_serialisation_round_trips_exactly():
    rows = np.array([[0.1, 1 / 3, math.pi], [1e-300, -2.5e17, math.nan]])
    t = ResultTable("t", ["a", "b", "c"], ["x", "y", "z"], rows, [("k", "v")])
    text = t.to_csv()
    assert text.startswith("# k=v\n# units=x,y,z\na,b,c\n")
    assert float(fmt(1 / 3)) == 1 / 3
    body = json.loads(t.to_json())
    assert body["columns"] == ["a", "b", "c"] and float(body["rows"][0][1]) == 1 / 3
    with pytest.raises(ValueError):
        ResultTable("t", ["a"], ["x", "y"], rows)


def test_pdf_tables():
    cfg = ExperimentConfig.from_mapping({"mobility": {"pause_probabilities": "0, 1"},
                                         "run": {"grid": "11", "compare": "true"}})
    run = cmd_pdf(cfg)
    grid, diff = run.tables
    assert grid.rows.shape == (121, 4)
    assert np.allclose(grid.column("f_X[wp=1]"), 0.25)
    d = diff.column("approx_minus_exact")
    assert d.max() > 0 > d.min()
    disk = cmd_pdf(ExperimentConfig.from_mapping({"domain": {"shape": "disk", "R": "2"},
                                                  "mobility": {"pause_probabilities": "0"}}))
    prof = disk.tables[0].column("f_X[wp=0]")
    assert np.all(np.diff(prof) < 0)


def test_connect_and_mu_tables():
    cfg = ExperimentConfig.from_mapping({"domain": {"a": "3", "b": "2"},
                                         "mobility": {"pause_probabilities": "0"},
                                         "network": {"nodes": "20", "receivers": "centre, corner",
                                                     "link_lengths": "0.5, 1.5"}})
    t = cmd_connect(cfg).tables[0]
    assert t.columns == ["d", "H[centre wp=0 N=20]", "H[corner wp=0 N=20]", "H[snr]", "H[unit_disk]"]
    assert t.column("H[unit_disk]").tolist() == [1.0, 0.0]
    assert np.all(t.column("H[corner wp=0 N=20]") > t.column("H[centre wp=0 N=20]"))
    m = cmd_mu(cfg.replace(network={"nodes": "5, 50"})).tables[0]
    assert m.column("N").tolist() == [5, 50]


def test_zero_link_length_needs_regularised_path_loss():
    cfg = ExperimentConfig.from_mapping({"network": {"link_lengths": "0, 1"}})
    with pytest.raises(ConfigError):
        cmd_connect(cfg)


def test_simulate_scenario_passes():
    cfg = ExperimentConfig.from_mapping({"mobility": {"pause_probabilities": "0.5"},
                                         "network": {"nodes": "10", "receivers": "centre",
                                                     "link_lengths": "0.3"},
                                         "run": {"trials": "4000", "seed": "3"}})
    run = cmd_simulate(cfg)
    assert run.failed_gates == 0
    meta = dict(run.tables[0].metadata)
    assert 0 < float(meta["sampler_acceptance_rate"]) < 1


def test_figure_presets_are_well_formed():
    names = [name for name, _, _ in preset_configs("fig3")]
    assert names == ["fig3_disk", "fig3_rectangle"]
    disk_cfg = preset_configs("fig3")[0][2]
    assert disk_cfg.domain.area == pytest.approx(Rectangle(10, 10).area)
    fig5 = preset_configs("fig5")
    assert len(fig5) == 4
    assert 235 in fig5[0][2].node_counts and 2000 in fig5[0][2].node_counts
    with pytest.raises(ConfigError):
        preset_configs("fig9")


def test_main_writes_tables_plots_and_manifest(tmp_path):
    out = tmp_path / "o"
    rc = main(["connect", "--out", str(out), "--nodes", "15", "--link-lengths", "0.2, 0.4", "--plot",
               "--pause-probabilities", "0"])
    assert rc == EXIT_OK
    assert (out / "connect.csv").exists() and (out / "connect.svg").exists()
    assert (out / "connect.svg").read_text().startswith("<svg")
    manifest = json.loads((out / "manifest.json").read_text())
    assert "elapsed_seconds" in manifest and manifest["files"][0] == "connect.csv"


def test_embedded_config_reproduces_the_table(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["mu", "--out", str(a), "--nodes", "3, 30", "--shape", "disk", "--R", "1.5",
                 "--gamma", "0.5", "--pause-probabilities", "0.2"]) == EXIT_OK
    assert main(["mu", "--out", str(b), "--config", str(a / "mu.csv")]) == EXIT_OK
    assert (a / "mu.csv").read_bytes() == (b / "mu.csv").read_bytes()


def test_flags_override_config_file(tmp_path):
    ini = tmp_path / "c.ini"
    ini.write_text("[network]\nnodes = 7\nlink_lengths = 0.5\n[mobility]\npause_probabilities = 0\n")
    assert main(["connect", "--config", str(ini), "--nodes", "9", "--out", str(tmp_path)]) == EXIT_OK
    meta, cols, _ = read_csv(tmp_path / "connect.csv")
    assert meta["config.network.nodes"] == "9.0"
    assert cols[1].endswith("N=9]")


def test_json_format(tmp_path):
    assert main(["pdf", "--format", "json", "--grid", "3", "--out", str(tmp_path)]) == EXIT_OK
    body = json.loads((tmp_path / "pdf.json").read_text())
    assert len(body["rows"]) == 9


def test_exit_codes(tmp_path, capsys):
    assert main(["connect", "--gamma", "3", "--out", str(tmp_path)]) == EXIT_CONFIG
    assert "channel.gamma" in capsys.readouterr().err
    assert main(["pdf", "--config", str(tmp_path / "missing.ini"), "--out", str(tmp_path)]) == EXIT_CONFIG
    # an impossible gate: the transmitter must sit inside a tiny disk
    assert main(["simulate", "--shape", "disk", "--R", "0.1", "--link-lengths", "0.5",
                 "--out", str(tmp_path)]) == EXIT_CONFIG
    assert main(["pdf", "--format", "xml", "--out", str(tmp_path)]) == EXIT_CONFIG
    assert "run.format" in capsys.readouterr().err
    # argparse usage errors share the configuration exit status
    with pytest.raises(SystemExit) as exc:
        main(["pdf", "--no-such-flag"])
    assert exc.value.code == EXIT_CONFIG


def test_validation_failure_exit_code(monkeypatch, tmp_path):
    from rwpnet.cli import commands

    def failing(cfg, name="simulate"):
        run = commands.Run()
        run.failed_gates = 2
        return run

    monkeypatch.setitem(commands.COMMANDS, "simulate", failing)
    assert main(["simulate", "--out", str(tmp_path)]) == EXIT_VALIDATION


def test_thread_override(monkeypatch, tmp_path):
    monkeypatch.setenv("RWPNET_THREADS", "3")
    assert thread_count() == 3
    monkeypatch.setenv("RWPNET_THREADS", "zero")
    with pytest.raises(ConfigError):
        thread_count()
    args = ["connect", "--heatmap", "--grid", "4", "--nodes", "20", "--link-lengths", "0.5",
            "--pause-probabilities", "0"]
    monkeypatch.setenv("RWPNET_THREADS", "1")
    assert main(args + ["--out", str(tmp_path / "one")]) == EXIT_OK
    monkeypatch.setenv("RWPNET_THREADS", "4")
    assert main(args + ["--out", str(tmp_path / "four")]) == EXIT_OK
    assert (tmp_path / "one" / "connect.csv").read_bytes() == (tmp_path / "four" / "connect.csv").read_bytes()


def test_audit_command(tmp_path):
    assert main(["audit", "--out", str(tmp_path)]) == EXIT_OK
    text = (tmp_path / "closed_form_audit.md").read_text()
    assert "| quantity |" in text and "side-length formula" in text
