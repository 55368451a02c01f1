import json
import socket
import threading

from mlmagma.cli import main
from mlmagma.prng import PrngConfig
from mlmagma import Params3, Vector3, make_modulus


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_mul(capsys):
    code, out, _ = run(capsys, "mul", "--p", "23", "--params", "9,19,1,1,2",
                       "--a", "0,1,0", "--b", "0,0,1")
    assert code == 0
    assert out.strip() == "(0,3,1)"


def test_pow_with_cross_check(capsys):
    code, out, _ = run(capsys, "pow", "--p", "101", "--params", "1,1,1,1,1",
                       "--a", "1,0,0", "--n", "5", "--check-iter")
    assert code == 0
    assert out.strip() == "(31,0,0)"


def test_mul_dim4(capsys):
    code, out, _ = run(capsys, "mul", "--p", "7", "--params", "1,1,1,1,1,1,1,1,1",
                       "--a", "1,1,1,1", "--b", "1,1,1,1")
    assert code == 0
    assert out.strip() == "(2,0,0,0)"


def test_error_exit_code(capsys):
    code, _, err = run(capsys, "mul", "--p", "21", "--params", "1,1,1,1,1",
                       "--a", "1,0,0", "--b", "0,1,0")
    assert code == 2
    assert "not prime" in err


def test_check_commands(capsys):
    code, out, _ = run(capsys, "check", "assoc", "--p", "23",
                       "--params", "9,19,1,1,2", "--a", "1,1,1", "--max-n", "5")
    assert code == 0
    assert json.loads(out)["ok"] is True
    code, out, _ = run(capsys, "check", "power-identity", "--p", "101",
                       "--params", "1,1,1,1,1", "--a", "1,0,0",
                       "--max-m", "6", "--max-n", "6")
    assert code == 0


def test_sym_commands(capsys):
    code, out, _ = run(capsys, "sym", "verify")
    assert code == 0 and json.loads(out)["ok"] is True
    code, out, _ = run(capsys, "sym", "count", "--max-n", "4")
    doc = json.loads(out)
    assert [row["a_monomials"] for row in doc["counts"]] == [1, 5, 13, 26]
    code, out, _ = run(capsys, "sym", "expand", "--n", "2", "--component", "0")
    assert code == 0
    assert out.startswith("# component 0:")


def test_orbit_commands(capsys, tmp_path):
    code, out, _ = run(capsys, "orbit", "length", "--p", "23",
                       "--params", "9,19,1,1,2", "--a", "1,0,0")
    assert json.loads(out)["period"] == 11
    csv_path = tmp_path / "census.csv"
    code, out, _ = run(capsys, "--threads", "1", "orbit", "scan", "--p", "7",
                       "--params", "6,1,1,1,2", "--out", str(csv_path))
    assert code == 0
    doc = json.loads(out)
    assert doc["total_starts"] == 343
    assert csv_path.exists()
    code, out, _ = run(capsys, "orbit", "search", "--p", "23",
                       "--params", "9,19,1,1,2")
    assert code == 0
    assert json.loads(out)["found"]


def test_orbit_scan_budget_error(capsys):
    code, _, err = run(capsys, "orbit", "scan", "--p", "131",
                       "--params", "1,1,1,1,2")
    assert code == 2
    assert "cap" in err


def test_orbit_sweep(capsys, tmp_path):
    out_csv = tmp_path / "sweep.csv"
    out_json = tmp_path / "sweep.json"
    code, out, _ = run(capsys, "--threads", "1", "orbit", "sweep", "--p", "5",
                       "--c", "1", "--d", "1", "--e", "2",
                       "--out", str(out_csv), "--json", str(out_json))
    assert code == 0
    doc = json.loads(out)
    assert doc["pairs"] == 25
    assert out_csv.exists() and out_json.exists()
    assert "aggregate_walk" in doc


def test_prng_commands(capsys, tmp_path):
    m = make_modulus(37)
    cfg = PrngConfig(Params3(19, 18, 1, 1, 2, m),
                     (Vector3(0, 1, 5, m), Vector3(0, 2, 7, m)),
                     (0, 1), Vector3(3, 1, 4, m))
    path = tmp_path / "cfg.json"
    path.write_text(cfg.to_json())
    code, out, _ = run(capsys, "prng", "run", "--config", str(path),
                       "--count", "5")
    lines = out.strip().splitlines()
    assert lines[0] == "step,x0,x1,x2"
    assert len(lines) == 6
    code, out, _ = run(capsys, "prng", "cycle", "--config", str(path))
    doc = json.loads(out)
    assert doc["period"] is not None and doc["period"] % 2 == 0
    code, out, _ = run(capsys, "prng", "uniformity", "--config", str(path),
                       "--samples", "2000")
    assert "max_relative_deviation" in json.loads(out)
    code, out, _ = run(capsys, "prng", "search", "--p", "37",
                       "--params", "19,18,1,1,2", "--pattern", "0,1",
                       "--trials", "10", "--rng-seed", "3")
    doc = json.loads(out)
    assert doc["max_period"] == 37**3 * 2
    assert len(doc["leaderboard"]) <= 10


def test_dip_commands(capsys, tmp_path):
    code, out, _ = run(capsys, "dip", "solve", "--p", "101",
                       "--params", "1,1,1,1,1", "--base", "1,0,0",
                       "--target", "63,0,0", "--cap", "1000")
    assert code == 0
    assert json.loads(out)["exponent"] == 6
    # not-found exits nonzero
    code, out, _ = run(capsys, "dip", "solve", "--p", "101",
                       "--params", "1,1,1,1,1", "--base", "1,0,0",
                       "--target", "0,0,0", "--cap", "50")
    assert code == 1
    out_csv = tmp_path / "timing.csv"
    code, out, _ = run(capsys, "dip", "timing", "--p", "257",
                       "--params", "129,128,1,1,2",
                       "--exponents", "256,512,1024", "--samples", "1",
                       "--out", str(out_csv))
    assert code == 0
    assert out_csv.exists()


def test_kx_demo(capsys):
    code, out, _ = run(capsys, "kx", "demo", "--p", "101",
                       "--params", "1,1,1,1,1", "--base", "1,0,0",
                       "--bits", "8", "--seed", "7")
    doc = json.loads(out)
    assert code == 0 and doc["match"] is True
    assert doc["shared_alice"] == doc["shared_bob"]
    code, out, _ = run(capsys, "kx", "demo", "--p", "101",
                       "--params", "1,1,1,1,1", "--base", "1,0,0",
                       "--bits", "8", "--seed", "7", "--additive")
    assert json.loads(out)["mode"] == "additive"


def test_kx_listen_connect(capsys):
    # race-free: grab a free port first, then start the CLI listener on it
    probe = socket.socket()
    probe.bind(("127.0.0.1", 0))
    port = probe.getsockname()[1]
    probe.close()
    args = ["kx", "listen", "--p", "101", "--params", "1,1,1,1,1",
            "--base", "1,0,0", "--bits", "8", "--port", str(port), "--once"]
    server = threading.Thread(target=main, args=(args,), daemon=True)
    server.start()
    import time
    deadline = time.time() + 5
    code = None
    while time.time() < deadline:
        try:
            code = main(["kx", "connect", "--p", "101", "--params", "1,1,1,1,1",
                         "--base", "1,0,0", "--bits", "8", "--host", "127.0.0.1",
                         "--port", str(port)])
            break
        except Exception:
            time.sleep(0.05)
    server.join(timeout=5)
    out = capsys.readouterr().out
    assert code == 0
    assert '"shared"' in out
