import json
import subprocess
import sys

import pytest

from isolab import cli
from isolab.errors import IdentityViolation


def run(argv, capsys):
    code = cli.main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_int_list_forms():
    assert cli.int_list("8,12") == [8, 12]
    assert cli.int_list("4..7") == [4, 5, 6, 7]
    assert cli.int_list("1,3..4") == [1, 3, 4]
    assert cli.int_list([2, 3]) == [2, 3]
    assert cli.boolean("yes") is True and cli.boolean("0") is False
    with pytest.raises(ValueError):
        cli.boolean("maybe")


def test_resolve_precedence():
    cfg = cli.resolve("tf", {"rmax": 6}, {"theta": "0.5"})
    assert cfg == {"rmax": 6, "theta": 0.5}
    cfg = cli.resolve("tf", {"rmax": 6}, {"rmax": "7"})
    assert cfg["rmax"] == 7
    with pytest.raises(cli.SchemaError):
        cli.resolve("tf", {"bogus": 1}, {})
    with pytest.raises(cli.SchemaError):
        cli.resolve("tf", {}, {"rmax": "ten"})


def test_json_output(capsys):
    code, out, _ = run(["tempered", "--d", "1", "--k-max", "3", "--format", "json",
                        "--deterministic"], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["meta"]["subcommand"] == "tempered"
    assert "timestamp" not in doc["meta"]
    assert len(doc["rows"]) == 4 and doc["summary"]["below_2_pow_d"] is True


def test_csv_header_and_rows(capsys):
    code, out, _ = run(["lamplighter", "--k", "4..6", "--deterministic"], capsys)
    assert code == 0
    lines = out.splitlines()
    assert lines[0].startswith("# isolab_version:")
    assert any(line.startswith("# config_hash:") for line in lines)
    body = [line for line in lines if not line.startswith("#")]
    assert body[0].split(",")[0] == "k" and len(body) == 4


def test_deterministic_runs_identical(capsys):
    argv = ["curlfit", "--trials", "5", "--seed", "3", "--deterministic"]
    _, a, _ = run(argv, capsys)
    _, b, _ = run(argv, capsys)
    assert a == b


def test_seed_before_subcommand(capsys):
    _, a, _ = run(["--seed", "7", "curlfit", "--trials", "3", "--deterministic"], capsys)
    _, b, _ = run(["curlfit", "--trials", "3", "--seed", "7", "--deterministic"], capsys)
    assert "# seed: 7" in a.splitlines()
    assert a == b


def test_params_file(tmp_path, capsys):
    p = tmp_path / "p.json"
    p.write_text(json.dumps({"d": 1, "k_max": 2}))
    code, out, _ = run(["tempered", "--params", f"@{p}", "--format", "json",
                        "--deterministic"], capsys)
    assert code == 0 and len(json.loads(out)["rows"]) == 3


def test_output_file(tmp_path, capsys):
    path = tmp_path / "out.csv"
    code, out, err = run(["balloon", "-o", str(path), "--deterministic"], capsys)
    assert code == 0 and out == ""
    assert path.read_text().startswith("# isolab_version:")
    assert "prefix_boundaries" in err


@pytest.mark.parametrize("argv", [
    ["tf", "--params", '{"bogus": 1}'],
    ["tf", "--rmax", "ten"],
    ["tf", "--params", "[1, 2]"],
    ["mixing", "--distance", "kl"],
    ["profile", "--normalization", "area"],
    ["tf", "--threads", "0"],
])
def test_invalid_config_exits_2(argv, capsys):
    code, _, err = run(argv, capsys)
    assert code == 2 and err.startswith("isolab:")


def test_resource_guard_exits_3(capsys):
    code, _, err = run(["semidirect", "--R", "3000"], capsys)
    assert code == 3 and "resource" in err


def test_identity_violation_dumps_counterexample(tmp_path, capsys, monkeypatch):
    def broken(cfg, rng):
        raise IdentityViolation("forced", {"where": [1, 2]})

    monkeypatch.setitem(cli.RUNNERS, "heis", broken)
    out = tmp_path / "run"
    code, _, _ = run(["heis", "-o", str(out), "--deterministic"], capsys)
    assert code == 1
    doc = json.loads((tmp_path / "run.counterexample.json").read_text())
    assert doc["counterexample"] == {"where": [1, 2]}
    assert doc["meta"]["subcommand"] == "heis"


def test_config_hash_depends_on_params():
    a = cli.config_hash("tf", {"rmax": 6}, 0)
    assert a == cli.config_hash("tf", {"rmax": 6}, 0)
    assert a != cli.config_hash("tf", {"rmax": 7}, 0)
    assert a != cli.config_hash("tf", {"rmax": 6}, 1)


def test_every_subcommand_has_a_runner():
    assert set(cli.RUNNERS) == set(cli.SCHEMAS)


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "isolab", "tempered", "--d", "1", "--k-max", "1",
                          "--deterministic"], capture_output=True, text=True)
    assert res.returncode == 0 and "T_k" in res.stdout
