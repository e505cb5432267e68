"""Fixed CLI invocations whose reports are pinned byte for byte in ``golden/``.

Run this file directly to regenerate the golden reports after a deliberate
format change; review the diff before committing it.
"""

from __future__ import annotations

import contextlib
import io
import os
import sys
from pathlib import Path

from seqrand.cli import main

HERE = Path(__file__).parent
DATA = HERE / "data"
GOLDEN = HERE / "golden"

MIX = "mixture [(1/2, uniform), (1/4, bernoulli 3/4)]"

CORPUS: list[tuple[str, list[str]]] = [
    ("analyze_bernoulli_ones", ["analyze", "--predictor", "bernoulli 3/4", "--stream", "ones.txt"]),
    ("analyze_uniform_json", ["analyze", "--predictor", "uniform", "--stream", "mixed.txt", "--json"]),
    ("analyze_empty", ["analyze", "--predictor", MIX, "--stream", "empty.txt", "--growth", "sqrt +1"]),
    (
        "calibrate_110",
        ["calibrate", "--predictor", "bernoulli 2/3", "--stream", "s110.txt", "--window", "3/5", "7/10"],
    ),
    (
        "calibrate_vacuous_json",
        ["calibrate", "--predictor", "uniform", "--stream", "mixed.txt", "--window", "3/5", "7/10", "--json"],
    ),
    ("convert_uniform_process", ["convert", "--predictor", "bernoulli 1/2", "--to", "process", "--depth", "2"]),
    ("convert_table_aligned", ["convert", "--predictor", "table dist.tsv", "--to", "digit_aligned", "--depth", "2"]),
    ("convert_identity_back", ["convert", "--process", "identity2.tsv", "--to", "distribution", "--depth", "2"]),
    ("convert_martingale", ["convert", "--predictor", "bernoulli 3/4", "--to", "martingale", "--depth", "2"]),
    ("adversary_mixture", ["adversary", "--predictor", MIX, "--length", "8"]),
]


@contextlib.contextmanager
def _inside(path: Path):
    old = os.getcwd()
    os.chdir(path)
    try:
        yield
    finally:
        os.chdir(old)


def run(argv: list[str], cwd: Path = DATA) -> tuple[int, str, str]:
    """Run the CLI in-process from ``cwd``; returns (exit code, stdout, stderr)."""
    out, err = io.StringIO(), io.StringIO()
    with _inside(cwd), contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
        try:
            code = main(argv)
        except SystemExit as exc:  # argparse usage errors
            code = exc.code
    return code, out.getvalue(), err.getvalue()


def golden_path(name: str) -> Path:
    return GOLDEN / f"{name}.txt"


if __name__ == "__main__":
    for name, argv in CORPUS:
        code, out, err = run(argv)
        if code != 0:
            sys.exit(f"{name}: exit {code}: {err}")
        golden_path(name).write_text(out, encoding="utf-8")
        print(f"wrote {golden_path(name).name}")
