import argparse
import json
import logging

import pytest

from zetagaps import cli, store
from zetagaps import verify as vf
from zetagaps.errors import CompletenessError
from zetagaps.verify import LemmaId, VerificationReport


def ns(**kw):
    base = {name: None for _, name, _ in cli._FLAGS}
    base.update(kw)
    return argparse.Namespace(**base)


@pytest.fixture(autouse=True)
def quiet_root():
    yield
    logging.getLogger().handlers.clear()


# ---------------------------------------------------------------- configuration


def test_env_names():
    assert cli.env_name("sigma-max") == "ZETAGAPS_SIGMA_MAX"
    assert cli.env_name("T") == "ZETAGAPS_T"
    assert cli.env_name("eps-points") == "ZETAGAPS_EPS_POINTS"


def test_precedence():
    env = {"ZETAGAPS_T": "5000", "ZETAGAPS_THREADS": "4", "ZETAGAPS_EPS_POINTS": "20"}
    c = cli.resolve_config(ns(), env)
    assert (c.T, c.threads, c.eps_points, c.window_multiplier) == (5000.0, 4, 20, 2.0)
    c = cli.resolve_config(ns(T=2000.0), env)
    assert c.T == 2000.0 and c.threads == 4
    assert cli.resolve_config(ns(), {}) == cli.RunConfig()


def test_bad_env_value():
    with pytest.raises(cli.UsageError):
        cli.resolve_config(ns(), {"ZETAGAPS_EPS_POINTS": "many"})


@pytest.mark.parametrize(
    "kw",
    [
        {"T": 50.0},
        {"window_multiplier": 1.0},
        {"window_multiplier": 5.0},
        {"eps_points": 3},
        {"eps_min": 2.0, "eps_max": 1.0},
        {"eps_max": 40.0},
        {"sigma_max": 0.5},
        {"threads": 0},
        {"accuracy": 1e-3},
        {"T": 1e12},
    ],
)
def test_config_validation(kw):
    with pytest.raises(cli.UsageError):
        cli.RunConfig(**kw)


def test_guard_window():
    c = cli.RunConfig(T=1000.0)
    lo, hi = c.zeta_window
    assert lo < 1000.0 - 100 and hi > 2000.0 + 100
    assert cli.RunConfig(T=100.0).zeta_window[0] == 10.0


# ---------------------------------------------------------------- exit codes


def test_usage_errors(tmp_path, capsys):
    assert cli.main([]) == cli.EXIT_USAGE
    assert cli.main(["bogus"]) == cli.EXIT_USAGE
    assert cli.main(["zeros", "--T", "abc"]) == cli.EXIT_USAGE
    assert cli.main(["zeros", "--T", "10"]) == cli.EXIT_USAGE
    assert "error" in capsys.readouterr().err


def test_env_usage_error(monkeypatch, tmp_path):
    monkeypatch.setenv("ZETAGAPS_ACCURACY", "oops")
    assert cli.main(["zeros", "--out", str(tmp_path)]) == cli.EXIT_USAGE


def test_missing_archive(tmp_path):
    assert cli.main(["stats", "-q", "--out", str(tmp_path)]) == cli.EXIT_USAGE
    assert cli.main(["verify", "-q", "--out", str(tmp_path)]) == cli.EXIT_USAGE


def test_missing_external(tmp_path):
    assert cli.main(["crosscheck", "-q", str(tmp_path / "none.txt"), "--out", str(tmp_path)]) == cli.EXIT_USAGE


def test_computation_failure(monkeypatch, tmp_path):
    def boom(*a, **k):
        raise CompletenessError("sign changes fall short")

    monkeypatch.setattr(cli, "find_zeta_zeros", boom)
    assert cli.main(["zeros", "-q", "--T", "100", "--out", str(tmp_path)]) == cli.EXIT_FAILURE


def test_corrupt_archive_is_failure(tmp_path):
    (tmp_path / cli.ZETA_FILE).write_text("format,1,zeta,10.0,100.0\n1,zz\n")
    for name in (cli.ZPRIME_FILE, cli.PAIRING_FILE):
        (tmp_path / name).write_text("")
    assert cli.main(["stats", "-q", "--T", "100", "--out", str(tmp_path)]) == cli.EXIT_FAILURE


def test_violation_exit(monkeypatch, tmp_path, data_1e3):
    out = tmp_path / "run"
    out.mkdir()
    for name in (cli.ZETA_FILE, cli.ZPRIME_FILE, cli.PAIRING_FILE):
        (out / name).write_bytes((data_1e3.path / name).read_bytes())

    def fake(cfg, g, zp, pairs):
        return [
            VerificationReport(LemmaId.L11, 10, 1, -0.5, {"gamma_prime": 1000.5}),
            VerificationReport(LemmaId.C3, 10, 3, -1.0),
        ]

    monkeypatch.setattr(cli, "run_verification", fake)
    assert cli.main(["verify", "-q", "--out", str(out)]) == cli.EXIT_VIOLATION
    doc = json.loads((out / "verify.json").read_text())
    assert doc["violated"] == ["L11"]

    # a reported-only suite failing alone does not change the exit code
    monkeypatch.setattr(cli, "run_verification", lambda *a: fake(*a)[1:])
    assert cli.main(["verify", "-q", "--out", str(out)]) == cli.EXIT_OK


# ---------------------------------------------------------------- outputs


def test_empty_archives_give_zero_curves(tmp_path, caplog):
    cfg = cli.RunConfig(T=1000.0, output_dir=str(tmp_path))
    store.save_archive(store.make_archive("zeta", cfg.zeta_window, []), tmp_path / cli.ZETA_FILE)
    store.save_archive(store.make_archive("zeta_prime", cfg.window, []), tmp_path / cli.ZPRIME_FILE)
    store.save_archive(store.make_archive("pairing", cfg.window, []), tmp_path / cli.PAIRING_FILE)
    with caplog.at_level(logging.WARNING, logger="zetagaps"):
        assert cli.cmd_stats(cfg) == cli.EXIT_OK
    assert any("empty" in r.message for r in caplog.records)
    doc = json.loads((tmp_path / "stats.json").read_text())
    assert doc["m"]["population"] == 0
    assert doc["m"]["fit"]["exponent"] is None
    rows = (tmp_path / "m_curve.csv").read_text().splitlines()[1:]
    assert rows and all(r.split(",")[1] == "0.0" for r in rows)


def test_json_envelope(tmp_path, data_1e3):
    out = tmp_path / "run"
    out.mkdir()
    for name in (cli.ZETA_FILE, cli.ZPRIME_FILE, cli.PAIRING_FILE):
        (out / name).write_bytes((data_1e3.path / name).read_bytes())
    assert cli.main(["stats", "-q", "--out", str(out)]) == cli.EXIT_OK
    doc = json.loads((out / "stats.json").read_text())
    assert doc["format_version"] == store.FORMAT_VERSION
    assert doc["config"]["T"] == 1000.0
    assert doc["config"]["eps_grid"] == [0.05, 32.0, 40]
    assert doc["lemma_ids"] == ["C3"]
    assert doc["m"]["population"] == sum(1 for x in data_1e3.g if 1000 < x <= 2000)
    assert 2.0 <= doc["m"]["fit"]["exponent"] <= 4.0

    ext = tmp_path / "ext.txt"
    ext.write_text("\n".join(f"{x:.9f}" for x in data_1e3.g[:200]))
    assert cli.main(["crosscheck", "-q", str(ext), "--out", str(out)]) == cli.EXIT_OK
    cc = json.loads((out / "crosscheck.json").read_text())
    assert cc["report"]["compared"] == 200 and cc["report"]["max_deviation"] < 1e-9


def test_verify_json_lists_all_ids(monkeypatch, tmp_path, data_1e3):
    cfg = cli.RunConfig(output_dir=str(tmp_path))
    for name in (cli.ZETA_FILE, cli.ZPRIME_FILE, cli.PAIRING_FILE):
        (tmp_path / name).write_bytes((data_1e3.path / name).read_bytes())
    monkeypatch.setattr(cli, "run_verification", lambda *a: [VerificationReport(LemmaId.L7, 0, 0, 1.0)])
    assert cli.cmd_verify(cfg) == cli.EXIT_OK
    doc = json.loads((tmp_path / "verify.json").read_text())
    assert doc["lemma_ids"] == [x.value for x in LemmaId]
    assert doc["theorem_backed"] == [x.value for x in vf.THEOREM_BACKED]
    assert "threads" not in doc["config"]
