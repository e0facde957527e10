"""Regenerate (or check) the figure-data CSVs under tests/golden/.

    python scripts/regenerate_golden.py           # rewrite all files
    python scripts/regenerate_golden.py --check   # compare fresh output byte for byte
"""

from __future__ import annotations

import argparse
import math
import sys
import tempfile
from pathlib import Path

from psdfs.cli import main as cli

GOLDEN = Path(__file__).resolve().parent.parent / "tests" / "golden"
GRID = "-3.5:3.5:71"
ALPHAS = "0:2:21"

# name -> (argv without --out, files produced relative to the --out value)
JOBS = {
    "fig3_n3k1": (["wigner", "--n", "3", "--k", "1", "--alpha", "0.5", "--grid", GRID], [""]),
    "fig3_n4k2": (["wigner", "--n", "4", "--k", "2", "--alpha", "1.0", "--grid", GRID], [""]),
    "fig3_n5k3": (["wigner", "--n", "5", "--k", "3", "--alpha", "1.5", "--grid", GRID], [""]),
    "fig4a": (
        ["tomo", "--n", "3", "--k", "1", "--alpha", "0.5", "--eta", "0.5", "--theta", repr(math.pi / 4), "--grid", "-6:6:61"],
        ["_wdet.csv", "_pr.csv"],
    ),
    "measures_n3": (["measures", "--n", "3", "--k", "1,2,3", "--alpha-range", ALPHAS, "--format", "csv"], [""]),
    "measures_k1": (["measures", "--n", "1,2,3,4", "--k", "1", "--alpha-range", ALPHAS, "--format", "csv"], [""]),
    "fig8_kt0.1": (["evolve", "--n", "3", "--k", "1", "--alpha", "0.5", "--kt", "0.1", "--grid", GRID], [""]),
    "fig8_kt0.3": (["evolve", "--n", "3", "--k", "1", "--alpha", "0.5", "--kt", "0.3", "--grid", GRID], [""]),
    "fig8_kt0.5": (["evolve", "--n", "3", "--k", "1", "--alpha", "0.5", "--kt", "0.5", "--grid", GRID], [""]),
}


def golden_files(name: str) -> list[Path]:
    _, suffixes = JOBS[name]
    return [GOLDEN / (name + (s or ".csv")) for s in suffixes]


def run_job(name: str, dest: Path) -> list[Path]:
    """Run one job writing into ``dest``; returns the produced paths."""
    argv, suffixes = JOBS[name]
    if suffixes == [""]:
        out = dest / f"{name}.csv"
        code = cli([*argv, "--out", str(out)])
        paths = [out]
    else:
        prefix = dest / name
        code = cli([*argv, "--out", str(prefix)])
        paths = [Path(str(prefix) + s) for s in suffixes]
    if code != 0:
        raise RuntimeError(f"job {name} exited with {code}")
    return paths


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--check", action="store_true", help="compare instead of overwrite")
    ap.add_argument("jobs", nargs="*", help="subset of job names")
    args = ap.parse_args(argv)
    names = args.jobs or list(JOBS)
    bad = 0
    if args.check:
        with tempfile.TemporaryDirectory() as tmp:
            for name in names:
                for fresh, ref in zip(run_job(name, Path(tmp)), golden_files(name)):
                    same = ref.exists() and fresh.read_bytes() == ref.read_bytes()
                    bad += not same
                    print(f"{'same' if same else 'DIFF'} {ref.name}")
        return 1 if bad else 0
    GOLDEN.mkdir(parents=True, exist_ok=True)
    for name in names:
        for path in run_job(name, GOLDEN):
            print(f"wrote {path.relative_to(GOLDEN.parent.parent)}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
