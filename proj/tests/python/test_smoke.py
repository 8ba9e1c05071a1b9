"""Smoke tests for the Python bindings and the CLI's JSON contract."""

import json
import math
import os
import pathlib
import subprocess
from fractions import Fraction

import jsonschema
import pytest
from referencing import Registry, Resource

import hkq

ROOT = pathlib.Path(__file__).resolve().parents[2]
SCHEMAS = pathlib.Path(os.environ.get("HKQ_SCHEMAS", ROOT / "schemas"))
CLI = os.environ.get("HKQ_CLI")

SINGLE = '{"rank": 1, "weights": [[1]], "theta": ["1/2"]}'
HIRZ2 = '{"schema": 1, "rank": 2, "weights": [[1,0],[1,0],[0,1],[-2,1]], "theta": ["1/2","1/2"]}'
DIAG2 = '{"rank": 1, "weights": [[1],[1]], "theta": ["1/2"]}'


def _registry():
    resources = []
    for path in SCHEMAS.glob("*.schema.json"):
        doc = json.loads(path.read_text())
        resources.append((doc["$id"], Resource.from_contents(doc)))
    return Registry().with_resources(resources)


REGISTRY = _registry()


def validate(name, instance):
    schema = json.loads((SCHEMAS / f"{name}.schema.json").read_text())
    jsonschema.Draft202012Validator(schema, registry=REGISTRY).validate(instance)


def run(*args):
    """Prefer the installed executable; fall back to the in-process entry point."""
    if CLI:
        proc = subprocess.run([CLI, *args], capture_output=True, text=True, check=False)
        return proc.returncode, proc.stdout, proc.stderr
    return hkq.run_cli(list(args))


# ---------------------------------------------------------------- bindings


def test_weight_system_roundtrip():
    w = hkq.WeightSystem(2, [[1, 0], [0, 1]], ["1/3", Fraction(1, 4)])
    assert w.rank == 2 and w.size == 2
    assert w.theta == [Fraction(1, 3), Fraction(1, 4)]
    assert w.doubled().size == 4
    assert hkq.WeightSystem.from_json(HIRZ2) == hkq.hirzebruch_weights(2, 1, 1)


def test_hirzebruch_tables():
    w = hkq.hirzebruch_weights(3, 1, 1)
    assert hkq.unstable_maximal_supports(w) == [[0, 1], [2, 3], [3]]
    assert len(hkq.unstable_maximal_supports(w.doubled())) == 7
    assert hkq.quotient_compact(w)
    assert hkq.quotient_smooth(w) == (True, None)
    assert hkq.stabilizer(w, [2, 3])["order"] == 3


def test_classification_and_mu_weight():
    w = hkq.hirzebruch_weights(2, 1, 1)
    status, cert = hkq.classify_point(w, [0, 0, 1, 1])
    assert status == "unstable"
    assert hkq.mu_weight(w, [0, 0, 1, 1], cert) < 0
    assert hkq.classify_point(w, [1, 0, 0, 1]) == ("stable", None)
    assert hkq.mu_weight(w, [1, 0, 0, 0], [-1, 0]) == math.inf
    assert hkq.mu_weight(w, [1, 0, 0, 0], [0, -1]) == Fraction(-1, 2)


def test_kempf_ness_scalar_case():
    out = hkq.solve_kahler(hkq.WeightSystem(1, [[1]], ["1/2"]), [2])
    assert out["status"] == "converged"
    assert abs(out["xi_star"][0] - math.log(2)) < 1e-10
    with pytest.raises(hkq.UndecidedError):
        hkq.solve_kahler(hkq.WeightSystem(1, [[1], [-1]], [0]), [1, 0])


def test_hyperkahler_pipeline():
    w = hkq.hirzebruch_weights(2, 1, 1)
    out = hkq.solve_hyperkahler(w, [1, 1, 1, 1], [0, 0, 0, 0])
    assert out["status"] == "converged"
    x, z = out["representative"]
    assert max(abs(v) for v in hkq.mu_hyperkahler(w, x, z)) < 1e-9
    frame = hkq.reduced_frame(w, x, z)
    assert frame["dimension"] == 8
    assert frame["quaternion_deviation"] < 1e-9


def test_strata_and_suite():
    w = hkq.hirzebruch_weights(2, 1, 1)
    cands = hkq.hk_candidate_strata(w)
    pairs = {(tuple(c["support_x"]), tuple(c["support_z"])) for c in cands}
    assert ((2,), (3,)) in pairs
    report = hkq.hirzebruch_suite(2)
    assert report["passed"] and report["residual_order"] == 2


def test_error_types():
    with pytest.raises(hkq.ParseError):
        hkq.WeightSystem.from_json('{"rank": 1, "weights": [[1]], "theta": ["1/0"]}')
    with pytest.raises(hkq.PreconditionError):
        hkq.hirzebruch_suite(1, 0, 1)
    with pytest.raises(hkq.EnumerationBoundExceeded):
        hkq.unstable_maximal_supports(hkq.hirzebruch_weights(1), bound=2)
    assert issubclass(hkq.ParseError, ValueError)


# --------------------------------------------------------------------- CLI


@pytest.mark.parametrize(
    "schema,args",
    [
        ("analyze", ["analyze", HIRZ2]),
        ("analyze", ["--seed", "3", "analyze", SINGLE, "--certify"]),
        ("classify", ["classify", HIRZ2, '{"coords": [0, 0, 1, 1]}']),
        ("classify", ["classify", HIRZ2, '{"x": [1,0,1,0], "z": [0,0,0,1]}']),
        ("kn", ["kn", SINGLE, '{"coords": [2]}']),
        ("kn", ["kn", HIRZ2, '{"coords": [1, 1, 0, 0]}']),
        ("kn", ["kn", HIRZ2, '{"x": [1,1,1,1], "z": [0,0,0,0]}', "--hyperkahler"]),
        ("metric", ["metric", DIAG2, '{"x": [1, 0], "z": [0, 0]}']),
        ("metric", ["metric", HIRZ2, '{"x": [1,1,1,1], "z": [0,0,0,0]}']),
        ("hirzebruch", ["hirzebruch", "3", "1", "1"]),
    ],
)
def test_cli_output_validates(schema, args):
    code, out, err = run(*args)
    assert code == 0, err
    doc = json.loads(out)
    assert doc["schema"] == 1
    validate(schema, doc)


def test_inputs_validate():
    validate("weights", json.loads(HIRZ2))
    validate("point", {"coords": [1, ["1/2", -3]]})
    validate("point", {"x": [1], "z": [[0, 1]]})
    with pytest.raises(jsonschema.ValidationError):
        validate("weights", {"rank": 1, "weights": [[1]]})


def test_cli_exit_codes():
    assert run("hirzebruch", "1", "0", "1")[0] == 2
    code, _, err = run("analyze", '{"rank": 1,\n "weights": [[1]\n "theta": [1]}')
    assert code == 2 and "line 3, column 2" in err
    assert run("--tol", "1e-300", "metric", HIRZ2, '{"x": [1,1,1,1], "z": [0,0,0,0]}')[0] == 3
    assert run("kn", '{"rank":1,"weights":[[1],[-1]],"theta":[0]}', '{"coords": [1, 0]}')[0] == 4


def test_cli_is_deterministic():
    args = ["--seed", "9", "analyze", HIRZ2, "--certify"]
    assert run(*args)[1] == run(*args)[1]
    assert run(*args)[1] == hkq.run_cli(args)[1]
