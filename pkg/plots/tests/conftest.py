"""Fixtures built through the abagrad CLI — the only interface plots sees."""

import subprocess
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parents[1]))

FIXTURES = Path(__file__).parent / "fixtures"


def _run(args):
    proc = subprocess.run(["abagrad", *args], capture_output=True, text=True)
    return proc


@pytest.fixture(scope="session")
def corpus_csv(tmp_path_factory):
    out = tmp_path_factory.mktemp("csv") / "results.csv"
    proc = _run(["corpus", "--instances", "3", "--seed", "1",
                 "--wall-budget", "2", "--max-iters", "200",
                 "-o", str(out)])
    assert proc.returncode == 0, proc.stderr
    return out


@pytest.fixture(scope="session")
def trajectory_jsons(tmp_path_factory):
    """DFQ and QE reports for the same cyclic instance."""
    outdir = tmp_path_factory.mktemp("json")
    paths = {}
    for semantics in ("dfq", "qe"):
        proc = _run(["eval", str(FIXTURES / "cycle.aba"),
                     "--semantics", semantics, "--tau-init", "file",
                     "--trajectories", "--max-iters", "200"])
        assert proc.returncode == 0, proc.stderr
        path = outdir / f"{semantics}.json"
        path.write_text(proc.stdout)
        paths[semantics] = path
    return paths
