"""End-to-end checks of the czkit command line."""

import csv
import filecmp
import io
import json
import subprocess
import sys
import tempfile
from pathlib import Path

CZKIT = Path(sys.argv[1])
ROOT = Path(sys.argv[2])
FIX = ROOT / "tests" / "fixtures"
TOL = 1e-12
failures = []


def run(*args, expect=0):
    p = subprocess.run([str(CZKIT), *map(str, args)], capture_output=True, text=True)
    if p.returncode != expect:
        failures.append(f"{' '.join(map(str, args))}: exit {p.returncode}, wanted {expect}\n{p.stderr}")
    return p


def check(cond, msg):
    if not cond:
        failures.append(msg)


def fixture_values():
    oracle = json.loads((FIX / "expected.json").read_text())
    for case in oracle["cases"]:
        args = ["maximal", "--measure", FIX / case["measure"], "--function", FIX / case["function"],
                "--op", case["op"]]
        if "queries" in case:
            args += ["--queries", FIX / case["queries"]]
        rows = list(csv.DictReader(io.StringIO(run(*args).stdout)))
        check(len(rows) == len(case["rows"]), f"{case['measure']} {case['op']}: row count")
        for got, want in zip(rows, case["rows"]):
            tag = f"{case['measure']} {case['op']} x={want['x']}"
            check(abs(float(got["x"]) - want["x"]) <= TOL, tag + ": x")
            check(abs(float(got["upper"]) - want["upper"]) <= TOL, tag + f": upper {got['upper']}")
            if "lower" in want:
                check(abs(float(got["lower"]) - want["lower"]) <= TOL, tag + f": lower {got['lower']}")
            else:
                check(float(got["lower"]) >= want["lower_at_least"] - TOL, tag + f": lower {got['lower']}")


def determinism(tmp):
    a, b = tmp / "a.json", tmp / "b.json"
    run("gen", "--kind", "cantor", "--depth", 6, "--seed", 7, "--out", a)
    run("gen", "--kind", "cantor", "--depth", 6, "--seed", 7, "--out", b)
    check(filecmp.cmp(a, b, shallow=False), "gen is not byte-identical across runs")


def corpus_regenerates(tmp):
    out = tmp / "corpus"
    p = subprocess.run(["sh", str(ROOT / "tools" / "make_corpus.sh"), str(CZKIT), str(out)], capture_output=True,
                       text=True)
    check(p.returncode == 0, "make_corpus.sh failed: " + p.stderr)
    for f in sorted((ROOT / "corpus").glob("*.json")):
        check((out / f.name).exists() and filecmp.cmp(f, out / f.name, shallow=False),
              f"corpus file {f.name} does not regenerate")


def exit_codes(tmp):
    run("analyze", "--measure", tmp / "missing.json", expect=3)
    bad = tmp / "bad.json"
    bad.write_text('{"dim": 1}')
    run("analyze", "--measure", bad, expect=3)
    run("maximal", "--measure", FIX / "two_atoms.json", "--function", FIX / "one_atom_f.json", expect=3)
    run("gen", "--kind", "nope", expect=3)
    run("czd", "--measure", FIX / "two_atoms.json", "--function", FIX / "two_atoms_f.json", "--lambda", 0.5,
        "--out", tmp / "cz.json")
    run("verify", "--suite", "cubes", "--corpus", ROOT / "corpus", "--calibration",
        ROOT / "calibration" / "frozen.json")


def float_format(tmp):
    out = tmp / "m.csv"
    run("maximal", "--measure", FIX / "one_atom.json", "--function", FIX / "one_atom_f.json", "--op", "hl",
        "--queries", FIX / "half.json", "--out", out)
    rows = list(csv.reader(out.open()))
    check(rows[0] == ["x", "lower", "upper"], "csv header")


with tempfile.TemporaryDirectory() as d:
    tmp = Path(d)
    fixture_values()
    determinism(tmp)
    corpus_regenerates(tmp)
    exit_codes(tmp)
    float_format(tmp)

for f in failures:
    print("FAIL", f)
print(f"{len(failures)} failures")
sys.exit(1 if failures else 0)
