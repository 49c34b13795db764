import json
import math

import pytest

from stirapsim import cli
from stirapsim.cli import main

FAST_FLAGS = ["--restrict-to-s", "--t-start", "-2", "--t-end", "3", "--step", "0.002"]


def run_cli(argv, capsys):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestSimulateCommand:
    def test_writes_csv_and_meta(self, tmp_path, capsys):
        csv_path = tmp_path / "run.csv"
        code, out, err = run_cli(
            ["simulate", *FAST_FLAGS, "--csv", str(csv_path)], capsys
        )
        assert code == 0
        assert err == ""
        assert "final:" in out
        data = csv_path.read_bytes()
        assert data.startswith(b"t,P1,")
        assert b"\r\n" in data
        meta = json.loads((tmp_path / "run.meta.json").read_text())
        assert meta["config"]["scenario"] == "stirap"

    def test_default_paths_follow_the_scenario(self, tmp_path, capsys, monkeypatch):
        monkeypatch.chdir(tmp_path)
        code, out, _ = run_cli(["simulate", *FAST_FLAGS, "--scenario", "fstirap"], capsys)
        assert code == 0
        assert (tmp_path / "fstirap_metrics.csv").exists()
        assert (tmp_path / "fstirap_metrics.meta.json").exists()

    def test_meta_file_reproduces_the_run_exactly(self, tmp_path, capsys):
        first = tmp_path / "a.csv"
        code, _, _ = run_cli(["simulate", *FAST_FLAGS, "--csv", str(first)], capsys)
        assert code == 0
        second = tmp_path / "b.csv"
        code, _, _ = run_cli(
            [
                "simulate",
                "--config", str(tmp_path / "a.meta.json"),
                "--csv", str(second),
                "--meta", str(tmp_path / "b.meta.json"),
            ],
            capsys,
        )
        assert code == 0
        assert first.read_bytes() == second.read_bytes()

    def test_print_config_writes_nothing(self, tmp_path, capsys, monkeypatch):
        monkeypatch.chdir(tmp_path)
        code, out, _ = run_cli(
            ["simulate", "--tau", "2", "--kappa", "0.004g", "--print-config"], capsys
        )
        assert code == 0
        data = json.loads(out)
        assert data["params"]["tau"] == 2.0
        assert data["params"]["kappa"] == "0.02omega0"
        assert list(tmp_path.iterdir()) == []

    def test_dump_basis(self, capsys):
        code, out, _ = run_cli(["simulate", "--dump-basis"], capsys)
        assert code == 0
        data = json.loads(out)
        assert data["dim"] == 196
        assert len(data["subspace"]) == 8
        assert data["states"][data["subspace"][0]] == {
            "atomA": "g_a", "atomB": "g_0", "nR": 0, "nL": 0,
        }

    def test_dump_hamiltonian(self, capsys):
        code, out, _ = run_cli(["simulate", "--dump-hamiltonian", "0.0"], capsys)
        assert code == 0
        data = json.loads(out)
        assert data["t"] == 0.0
        assert data["dim"] == 196
        assert len(data["matrix"]) == 196

        code, out, _ = run_cli(["simulate", "--dump-basis"], capsys)
        basis = json.loads(out)
        sub = basis["subspace"]
        h = data["matrix"]
        # pump drive between the first two protocol states at t=0
        assert h[sub[0]][sub[1]][0] == pytest.approx(math.exp(-2.0))
        # decaying excited level shows up as a negative imaginary diagonal
        assert h[sub[1]][sub[1]][1] == pytest.approx(-0.025)

    def test_exclusive_dump_flags(self, capsys):
        with pytest.raises(SystemExit):
            main(["simulate", "--print-config", "--dump-basis"])


class TestExitCodes:
    def test_config_error_is_2(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text('{"params": {"tau": -1}}', encoding="utf-8")
        code, _, err = run_cli(["simulate", "--config", str(bad)], capsys)
        assert code == 2
        assert "error (config)" in err
        assert "tau" in err

    def test_missing_config_file_is_2(self, tmp_path, capsys):
        code, _, err = run_cli(
            ["simulate", "--config", str(tmp_path / "gone.json")], capsys
        )
        assert code == 2
        assert "not found" in err

    def test_bad_rate_flag_is_2(self, capsys):
        code, _, err = run_cli(["simulate", "--kappa", "lots"], capsys)
        assert code == 2
        assert "kappa" in err

    def test_numerical_refusal_is_3(self, tmp_path, capsys):
        code, _, err = run_cli(
            ["simulate", "--step", "0.05", "--csv", str(tmp_path / "x.csv")], capsys
        )
        assert code == 3
        assert "error (numerical)" in err
        assert "reduce step" in err

    def test_output_error_is_4(self, tmp_path, capsys):
        code, _, err = run_cli(
            ["simulate", *FAST_FLAGS, "--csv", str(tmp_path / "no" / "dir" / "x.csv")],
            capsys,
        )
        assert code == 4
        assert "error (io)" in err

    def test_version_flag(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["--version"])
        assert exc.value.code == 0
        assert "stirapsim" in capsys.readouterr().out


class TestDarkcheckCommand:
    def test_runs_and_reports(self, tmp_path, capsys, monkeypatch):
        monkeypatch.chdir(tmp_path)
        code, out, _ = run_cli(["darkcheck", "--times", "11"], capsys)
        assert code == 0
        assert (tmp_path / "darkcheck.csv").exists()
        assert "defined points: 11/11" in out

    def test_seeded_runs_are_identical(self, tmp_path, capsys):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        for path in (a, b):
            code, _, _ = run_cli(
                ["darkcheck", "--times", "7", "--seed", "3", "--csv", str(path)], capsys
            )
            assert code == 0
        assert a.read_bytes() == b.read_bytes()


def write_spec(tmp_path, **overrides):
    spec = {
        "base": {"step": 0.002, "t_start": -2.0, "t_end": 3.0},
        "axes": [["tau", [1.0, 2.0]]],
        "outputs": ["fid_qubit", "norm"],
    }
    spec.update(overrides)
    path = tmp_path / "spec.json"
    path.write_text(json.dumps(spec), encoding="utf-8")
    return path


class TestScanCommand:
    def test_scan_with_objective(self, tmp_path, capsys):
        path = write_spec(tmp_path)
        out_csv = tmp_path / "scan.csv"
        code, out, err = run_cli(
            ["scan", str(path), "--csv", str(out_csv), "--objective", "1-fid_qubit"],
            capsys,
        )
        assert code == 0
        assert err == ""
        assert "best point:" in out
        best = json.loads(out.split("best point:", 1)[1])
        assert best["error"] == ""
        lines = out_csv.read_bytes().split(b"\r\n")
        assert lines[0] == b"tau,fid_qubit,norm,error"
        assert len(lines) == 4  # header + 2 points + trailing newline

    def test_partial_failure_returns_1(self, tmp_path, capsys):
        path = write_spec(
            tmp_path,
            base={"step": 0.005, "t_start": -2.0, "t_end": 3.0},
            axes=[["tau", [1.0, 4.0]]],
        )
        code, out, err = run_cli(["scan", str(path), "--csv", str(tmp_path / "s.csv")], capsys)
        assert code == 1
        assert "1 of 2 points failed" in err
        # the good row is still written
        assert "NumericalRefusal" in (tmp_path / "s.csv").read_text()

    def test_bad_spec_is_2(self, tmp_path, capsys):
        path = write_spec(tmp_path, axes=[["flux", [1.0]]])
        code, _, err = run_cli(["scan", str(path)], capsys)
        assert code == 2
        assert "flux" in err


@pytest.fixture()
def fake_server(monkeypatch):
    """Routes CLI --server requests through the app without a socket."""
    from fastapi.testclient import TestClient

    from stirapsim.service import create_app

    client = TestClient(create_app())

    def post(server, route, payload):
        resp = client.post(route, json=payload)
        if resp.status_code >= 400:
            body = resp.json()
            kind = body.get("kind", "internal")
            exc_type = {
                "config": cli.ConfigError,
                "numerical": cli._numerical_type(),
            }.get(kind, cli.SimulatorError)
            raise exc_type(f"server: {body.get('message', resp.text)}")
        return resp.json()

    monkeypatch.setattr(cli, "_post", post)
    return client


class TestServerMode:
    def test_server_csv_is_byte_identical(self, tmp_path, capsys, fake_server):
        local = tmp_path / "local.csv"
        remote = tmp_path / "remote.csv"
        code, _, _ = run_cli(["simulate", *FAST_FLAGS, "--csv", str(local)], capsys)
        assert code == 0
        code, _, _ = run_cli(
            ["simulate", *FAST_FLAGS, "--csv", str(remote), "--server", "http://x"],
            capsys,
        )
        assert code == 0
        assert local.read_bytes() == remote.read_bytes()

    def test_server_errors_keep_their_exit_codes(self, tmp_path, capsys, fake_server):
        # config errors are caught before the request is sent
        code, _, err = run_cli(
            ["simulate", "--tau", "-1", "--csv", str(tmp_path / "x.csv"),
             "--server", "http://x"],
            capsys,
        )
        assert code == 2
        # a refusal only surfaces server-side and must map back to exit 3
        code, _, err = run_cli(
            ["simulate", "--step", "0.05", "--csv", str(tmp_path / "x.csv"),
             "--server", "http://x"],
            capsys,
        )
        assert code == 3
        assert "server:" in err

    def test_server_scan(self, tmp_path, capsys, fake_server):
        path = write_spec(tmp_path)
        out_csv = tmp_path / "scan.csv"
        code, out, _ = run_cli(
            ["scan", str(path), "--csv", str(out_csv), "--server", "http://x",
             "--objective", "1-fid_qubit"],
            capsys,
        )
        assert code == 0
        assert "best point:" in out
        assert out_csv.read_bytes().startswith(b"tau,fid_qubit,norm,error\r\n")
