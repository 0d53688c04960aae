"""End-to-end checks of the plectic binary: exit codes, report schema,
determinism and a few payload values."""

import json
import os
import subprocess
import sys
import tempfile
import unittest

import jsonschema

BINARY = os.environ["PLECTIC_BIN"]
ROOT = os.environ["PLECTIC_ROOT"]
FIX = os.path.join(ROOT, "fixtures")

with open(os.path.join(ROOT, "schemas", "report.schema.json")) as f:
    SCHEMA = json.load(f)
with open(os.path.join(ROOT, "schemas", "cycle.schema.json")) as f:
    CYCLE_SCHEMA = json.load(f)


def run(*args, env=None):
    p = subprocess.run([BINARY, *args], capture_output=True, text=True, env=env, timeout=600)
    report = json.loads(p.stdout) if p.stdout else None
    if report is not None:
        jsonschema.validate(report, SCHEMA)
    return p.returncode, report, p.stdout


def fixture(name):
    return os.path.join(FIX, name)


# (arguments, expected exit code); every case runs at both precisions.
CASES = [
    (["phs", "validate", "--input", fixture("phs_elliptic.json")], 0),
    (["phs", "validate", "--input", fixture("phs_broken_symmetry.json")], 1),
    (["phs", "refine", "--input", fixture("phs_elliptic.json")], 0),
    (["phs", "filtration", "--input", fixture("phs_elliptic.json")], 0),
    (["phs", "tensor", "--input", fixture("phs_tensor.json")], 0),
    (["phs", "jacobian", "--input", fixture("phs_elliptic.json")], 0),
    (["torus", "dual", "--input", fixture("torus_elliptic.json")], 0),
    (["torus", "endos", "--input", fixture("torus_sqrt5_roundtrip.json")], 0),
    (["torus", "rm-detect", "--input", fixture("torus_sqrt5_roundtrip.json")], 0),
    (["torus", "rm-construct", "--input", fixture("torus_sqrt5_construct.json")], 0),
    (["torus", "rm-algebraize", "--input", fixture("torus_sqrt5_roundtrip.json")], 0),
    (["flat", "verify-identities", "--n", "2", "--truncation", "2"], 0),
    (["flat", "verify-laplacian", "--input", fixture("flat_weighted.json")], 1),
    (["flat", "harmonic", "--input", fixture("flat_weighted.json")], 0),
    (["flat", "extract-phs", "--input", fixture("flat_weighted.json"), "--degree", "2"], 0),
    (["flat", "metric-independence", "--input", fixture("flat_metric.json")], 0),
    (["qsv", "build", "--input", fixture("qsv_tensor.json")], 0),
    (["qsv", "strongly-primitive", "--input", fixture("qsv_strongly_primitive.json")], 0),
    (["qsv", "nu-structure", "--input", fixture("qsv_tensor.json"), "--index", "2"], 0),
    (["qsv", "characters", "--input", fixture("qsv_tensor.json")], 0),
    (["qsv", "jacobian", "--input", fixture("qsv_tensor.json")], 0),
    (["aj", "periods", "--input", fixture("aj_square.json")], 0),
    (["aj", "compute", "--input", fixture("aj_square.json")], 0),
    (["aj", "theorem-b", "--input", fixture("aj_square.json"), "--seed", "7", "--trials", "20"], 0),
    (["aj", "theorem-b", "--input", fixture("aj_elliptic.json"), "--seed", "7", "--trials", "20"], 0),
    (["phs", "validate", "--input", fixture("malformed.json")], 2),
    (["aj", "compute", "--input", fixture("phs_elliptic.json")], 2),
    (["phs", "validate", "--input", fixture("phs_elliptic.json"), "--precision", "40"], 2),
    (["phs", "validate", "--input", fixture("phs_elliptic.json"), "--tolerance", "-1"], 2),
]


class Subcommands(unittest.TestCase):
    def test_exit_codes_and_schema(self):
        for args, code in CASES:
            for prec in ("53", "128"):
                full = args if "--precision" in args else args + ["--precision", prec]
                with self.subTest(args=" ".join(full)):
                    got, report, _ = run(*full)
                    self.assertEqual(got, code)
                    self.assertIsNotNone(report)
                    self.assertEqual(report["status"], {0: "pass", 1: "fail", 2: "error"}[code])

    def test_determinism(self):
        for args in (["aj", "theorem-b", "--input", fixture("aj_square.json"), "--seed", "11", "--trials", "10"],
                     ["torus", "rm-algebraize", "--input", fixture("torus_sqrt5_roundtrip.json")],
                     ["flat", "harmonic", "--input", fixture("flat_weighted.json")]):
            self.assertEqual(run(*args)[2], run(*args)[2])


class Payloads(unittest.TestCase):
    def test_identities_example(self):
        code, rep, _ = run("flat", "verify-identities", "--n", "2", "--truncation", "2")
        self.assertEqual(code, 0)
        self.assertLess(float(rep["result"]["max_residual"]), 1e-10)

    def test_broken_symmetry_reports_residual(self):
        _, rep, _ = run("phs", "validate", "--input", fixture("phs_broken_symmetry.json"))
        self.assertGreater(float(rep["result"]["symmetry_residual"]), 0.1)

    def test_rm_round_trip_payload(self):
        code, rep, _ = run("torus", "rm-algebraize", "--input", fixture("torus_sqrt5_roundtrip.json"))
        self.assertEqual(code, 0)
        r = rep["result"]
        self.assertEqual(r["field"]["radicand"], 5)
        self.assertTrue(r["isomorphic"])
        self.assertEqual(len(r["z"]), 2)
        for z in r["z"]:
            self.assertGreater(float(z[1]), 0)

    def test_malformed_position(self):
        code, rep, _ = run("phs", "validate", "--input", fixture("malformed.json"))
        self.assertEqual(code, 2)
        self.assertIn("byte", rep["error"]["message"])
        self.assertIn("line 2", rep["error"]["message"])

    def test_config_echo_and_env_precision(self):
        env = dict(os.environ, PLECTIC_PRECISION="53")
        _, rep, _ = run("phs", "validate", "--input", fixture("phs_elliptic.json"), env=env)
        self.assertEqual(rep["config"]["precision"], 53)
        _, rep, _ = run("phs", "validate", "--input", fixture("phs_elliptic.json"), "--precision", "96", env=env)
        self.assertEqual(rep["config"]["precision"], 96)
        self.assertEqual(rep["config"]["truncation"], 1)

    def test_output_file(self):
        with tempfile.TemporaryDirectory() as d:
            out = os.path.join(d, "r.json")
            code, _, stdout = run("torus", "dual", "--input", fixture("torus_elliptic.json"), "--output", out)
            self.assertEqual((code, stdout), (0, ""))
            with open(out) as f:
                jsonschema.validate(json.load(f), SCHEMA)

    def test_aj_compute_product_formula(self):
        _, rep, _ = run("aj", "compute", "--input", fixture("aj_square.json"), "--precision", "53")
        f = [complex(float(a), float(b)) for a, b in rep["result"]["functional"]]
        d1 = complex(0.3, 0.2) - complex(0.1, -0.4)
        d2 = complex(0.6, 0.1) - complex(-0.2, 0.3)
        self.assertAlmostEqual(abs(f[0] - d1 * d2), 0, places=14)
        self.assertAlmostEqual(abs(f[1] - d1 * d2.conjugate()), 0, places=14)

    def test_harness_classical_membership(self):
        _, rep, _ = run("aj", "theorem-b", "--input", fixture("aj_elliptic.json"), "--trials", "50")
        fw = [m for m in rep["result"]["modes"] if m["mode"] == "factorwise"][0]
        self.assertEqual(fw["membership_failures"], 0)
        self.assertLess(float(fw["max_residual"]), 1e-10)

    def test_cycle_fixtures_match_schema(self):
        for name in ("aj_square.json", "aj_elliptic.json"):
            with open(fixture(name)) as f:
                jsonschema.validate(json.load(f)["cycle"], CYCLE_SCHEMA)


if __name__ == "__main__":
    unittest.main(argv=[sys.argv[0], "-v"])
