"""End-to-end checks of the pdcert binary: exit codes, determinism, JSON schemas.

usage: check_cli.py PDCERT SCHEMA_DIR
"""
import csv
import io
import json
import math
import os
import subprocess
import sys
import tempfile

import jsonschema

BIN, SCHEMAS = sys.argv[1], sys.argv[2]
failures = []


def schema(name):
    with open(os.path.join(SCHEMAS, name + ".schema.json")) as f:
        return json.load(f)


def run(*args, expect=0):
    p = subprocess.run([BIN, *args], capture_output=True, text=True, timeout=600)
    if p.returncode != expect:
        failures.append(f"{' '.join(args)}: exit {p.returncode}, expected {expect}\n{p.stderr}")
    return p


def check(cond, what):
    if not cond:
        failures.append(what)


def validate(doc, name, what):
    try:
        jsonschema.validate(doc, schema(name))
    except jsonschema.ValidationError as e:
        failures.append(f"{what}: {e.message}")


# bounds: exit 0, JSON on stdout, schema, sandwich values
p = run("--json", "-", "bounds", "--u", "box:1", "--v", "box:5", "--witness-trials", "20")
rep = json.loads(p.stdout)
validate(rep, "report", "bounds 1D")
check(abs(rep["sandwich"]["lower"] - 1.8) < 1e-12, "1D lower is 1.8")
check(abs(rep["sandwich"]["upper"] - 2.2) < 1e-12, "1D upper is 2.2")
check(rep["consistency"], "1D consistent")

p = run("--json", "-", "bounds", "--dim", "2", "--u", "ball:1", "--v", "cross:3", "--witness-trials", "30")
validate(json.loads(p.stdout), "report", "bounds ball/cross")

# determinism: identical bytes for identical seeds
a = run("--seed", "5", "--json", "-", "bounds", "--dim", "2", "--u", "ball:1", "--v", "ball:2.5").stdout
b = run("--seed", "5", "--json", "-", "bounds", "--dim", "2", "--u", "ball:1", "--v", "ball:2.5").stdout
check(a == b, "bounds output is reproducible")

# certificate export
with tempfile.TemporaryDirectory() as tmp:
    cert_path = os.path.join(tmp, "cert.json")
    run("bounds", "--dim", "2", "--u", "box:1", "--v", "box:2", "--no-witnesses", "--certificate", cert_path)
    with open(cert_path) as f:
        cert = json.load(f)
    validate(cert, "certificate", "certificate")
    check(len(cert["X"]) == 25, "square certificate has 25 translates")
    # about 8.1e6 translates: over the export cap
    run("bounds", "--dim", "3", "--u", "box:1", "--v", "box:100", "--no-witnesses",
        "--certificate", os.path.join(tmp, "big.json"), expect=4)

    # sweep: CSV column contract and the plot file next to it
    csv_path = os.path.join(tmp, "sweep.csv")
    json_path = os.path.join(tmp, "sweep.json")
    run("--csv", csv_path, "--json", json_path, "sweep", "--dims", "1..2", "--r", "1,5", "--no-witnesses")
    with open(csv_path) as f:
        rows = list(csv.DictReader(f))
    check(len(rows) == 4, "sweep has 4 rows")
    check(list(rows[0].keys()) == ["n", "r", "lower_lattice", "upper_tiling", "upper_rogers",
                                   "witness_best", "ref_2n", "ref_2n_delta"], "sweep CSV columns")
    check(math.isclose(float(rows[1]["upper_tiling"]), 2.2), "sweep 1D r=5 tiling")
    check(os.path.exists(os.path.join(tmp, "sweep.dat")), "sweep .dat written")
    with open(json_path) as f:
        validate(json.load(f), "sweep", "sweep")

p = run("sweep", "--dims", "1", "--r", "2..4")
check(len(list(csv.reader(io.StringIO(p.stdout)))) == 4, "sweep CSV on stdout")

# witness
p = run("--json", "-", "witness", "--u", "box:1", "--v", "box:2", "--f", "gauss:1")
w = json.loads(p.stdout)
validate(w, "witness", "witness gauss")
check(abs(w["ratio"] - 0.506169371249383509) < 1e-12, "gauss ratio example")
p = run("--json", "-", "witness", "--dim", "2", "--u", "box:1", "--v", "box:2", "--f", "latdir:Z2,R=20")
validate(json.loads(p.stdout), "witness", "witness latdir")

# oracle
p = run("--seed", "7", "--json", "-", "oracle", "zq", "--q", "1024", "--n", "128", "--trials", "2000")
z = json.loads(p.stdout)
validate(z, "zq", "oracle zq")
check(z["argmax"] == "trial:356" and z["argmax_digest"] == "5ed5085af6f70a51", "oracle frozen regression")
check(z["min_dft"] is None, "no DFT audit above q = 256")
p = run("--json", "-", "oracle", "zq", "--q", "128", "--n", "16", "--trials", "300")
validate(json.loads(p.stdout), "zq", "oracle zq small")

# verify: pass, and exit 3 under each tamper hook
p = run("--json", "-", "verify", "--criterion", "4")
v = json.loads(p.stdout)
validate(v, "verify", "verify")
check(v["passed"], "criterion 4 passes")
run("verify", "--criterion", "1", "--tamper-grid", "0.3", expect=3)
run("verify", "--criterion", "2", "--tamper-count", "1", expect=3)

# parse errors
run("bounds", "--u", "ball:1", "--v", "ball:2", expect=2)  # no dimension
run("bounds", "--dim", "2", "--u", "ball:1", "--v", "sum(ball:1;box:1)", expect=2)
run("bounds", "--dim", "2", "--u", "box:1,2,3", "--v", "ball:2", expect=2)
run("witness", "--dim", "2", "--u", "ball:1", "--v", "ball:2", "--f", "cms:J=0", expect=2)
run("oracle", "zq", "--q", "16", "--n", "8", expect=2)
run("sweep", "--dims", "3..1", expect=2)
run("--tol", "-1", "bounds", "--u", "box:1", "--v", "box:2", expect=2)
run("frobnicate", expect=2)

if failures:
    print("\n".join(failures))
    print(f"{len(failures)} CLI check(s) failed")
    sys.exit(1)
print("all CLI checks passed")
