import subprocess
import sys

import pytest

from affine_sessions import demos
from affine_sessions.cli import main


def run_cli(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr().out


def test_ping(capsys):
    assert run_cli(capsys, "ping") == (0, "pong\n")


def test_ping_is_deterministic():
    outcomes = {(o.exit_code, tuple(o.lines)) for o in (demos.ping() for _ in range(100))}
    assert outcomes == {(0, ("pong",))}


def test_ping_cancel(capsys):
    code, out = run_cli(capsys, "ping", "--cancel")
    assert code == 1
    assert "pong" not in out


@pytest.mark.parametrize("op, x, expected", [("sqr", "4", "16"), ("neg", "4", "-4"), ("sqr", "0", "0")])
def test_calc(capsys, op, x, expected):
    assert run_cli(capsys, "calc", op, x) == (0, expected + "\n")


@pytest.mark.parametrize(
    "argv",
    [
        ["calc", "pow", "4"],
        ["calc", "sqr", "four"],
        ["calc", "sqr", str(2**31)],
        ["fanin", "0"],
        ["stream", "-1"],
        [],
        ["bogus"],
    ],
)
def test_usage_errors(capsys, argv):
    with pytest.raises(SystemExit) as info:
        main(argv)
    assert info.value.code == 2


def test_fanin(capsys):
    code, out = run_cli(capsys, "fanin", "10")
    assert code == 0
    assert sorted(int(line) for line in out.splitlines()) == list(range(10))


def test_fanin_one(capsys):
    assert run_cli(capsys, "fanin", "1") == (0, "0\n")


def test_fanin_order_varies():
    orders = {tuple(demos.fanin(100).lines) for _ in range(20)}
    assert len(orders) > 1
    assert all(sorted(map(int, o)) == list(range(100)) for o in orders)


@pytest.mark.parametrize("n", [1, 5, 1000])
def test_stream(capsys, n):
    code, out = run_cli(capsys, "stream", str(n))
    assert code == 0
    assert out.splitlines() == [str(i) for i in range(n)]


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "affine_sessions", "calc", "sqr", "4"],
        capture_output=True,
        text=True,
        timeout=10,
    )
    assert (proc.returncode, proc.stdout) == (0, "16\n")


def test_cancelled_exit_is_clean():
    proc = subprocess.run(
        [sys.executable, "-m", "affine_sessions", "ping", "--cancel"],
        capture_output=True,
        text=True,
        timeout=10,
    )
    assert proc.returncode == 1
    assert proc.stdout == ""
    assert "Traceback" not in proc.stderr
