import io
import json
import os
from contextlib import redirect_stdout

import pytest

from deeplocus.cli import (
    ParseError,
    SCENARIOS,
    UnknownScenario,
    ingest_surface,
    main,
    parse_field,
    run_scenario,
)
from deeplocus.field import QI, QQ
from deeplocus.surface import InvalidPairing

DATA = os.path.join(os.path.dirname(__file__), "data")


def run_cli(argv):
    buf = io.StringIO()
    with redirect_stdout(buf):
        code = main(argv)
    return code, buf.getvalue()


class TestFieldSelector:
    def test_selectors(self):
        assert parse_field("q") is not None and parse_field("q") == QQ
        assert parse_field("qi") == QI
        assert parse_field("fp:5").characteristic == 5

    def test_bad_selector(self):
        with pytest.raises(ParseError):
            parse_field("gf256")
        with pytest.raises(ParseError):
            parse_field("fp:nine")


class TestIngestion:
    def test_annulus22(self):
        t = ingest_surface(os.path.join(DATA, "annulus22.json"))
        assert t.invariants() == (0, 2, 4, 8)

    def test_disk6(self):
        t = ingest_surface(os.path.join(DATA, "disk6.json"))
        assert t.invariants() == (0, 1, 6, 9)

    def test_malformed_gluing(self):
        with pytest.raises(InvalidPairing):
            ingest_surface(os.path.join(DATA, "bad_gluing.json"))

    def test_missing_file(self):
        with pytest.raises(ParseError):
            ingest_surface(os.path.join(DATA, "nope.json"))


class TestScenarios:
    def test_unknown_scenario(self):
        with pytest.raises(UnknownScenario):
            run_scenario("no-such-thing", None)
        code, _ = run_cli(["scenario", "no-such-thing"])
        assert code == 2

    def test_list(self):
        code, out = run_cli(["scenario", "list"])
        assert code == 0
        assert set(out.split()) == set(SCENARIOS)

    @pytest.mark.parametrize(
        "name", ["polygon-a3", "polygon-scan", "badcut", "markov-collapse"]
    )
    def test_quick_scenarios_pass(self, name):
        code, out = run_cli(["scenario", name])
        assert code == 0
        assert "FAIL" not in out

    def test_scenario_with_surface_file(self):
        path = os.path.join(DATA, "annulus22.json")
        code, out = run_cli(["scenario", "surface-components", "--surface", path])
        assert code == 0 and "FAIL" not in out

    def test_json_output_is_deterministic(self):
        code1, out1 = run_cli(["scenario", "polygon-hexagon", "--json", "--seed", "9"])
        code2, out2 = run_cli(["scenario", "polygon-hexagon", "--json", "--seed", "9"])
        assert code1 == code2 == 0
        assert out1 == out2
        doc = json.loads(out1)
        assert doc["schema"] == 1
        assert doc["summary"]["failed"] == 0


class TestSubcommands:
    def test_polygon_deep_typea(self):
        code, out = run_cli(["polygon", "deep-typea", "--rank", "3"])
        assert code == 0
        doc = json.loads(out)
        assert doc["certified_deep"] is True
        values = {(v["i"], v["j"]): v["value"] for v in doc["deep_point"]["values"]}
        assert values[(1, 4)] == "-1" and values[(1, 3)] == "0"

    def test_polygon_deep_typea_missing(self):
        code, out = run_cli(["polygon", "deep-typea", "--rank", "2"])
        assert code == 0
        assert json.loads(out)["deep_point"] is None

    def test_polygon_from_edges(self):
        code, out = run_cli(
            ["polygon", "from-edges", "--edges", "2,2,1,2,2,1", "--field", "q"]
        )
        assert code == 0
        doc = json.loads(out)
        assert doc["certified_deep"] is True
        values = {(v["i"], v["j"]): v["value"] for v in doc["deep_point"]["values"]}
        assert values[(2, 5)] == "-4"

    def test_polygon_scan(self):
        code, out = run_cli(["polygon", "scan", "--n", "6", "--field", "fp:3"])
        assert code == 0
        doc = json.loads(out)
        assert len(doc["deep_points"]) == 1

    def test_rank2(self):
        code, out = run_cli(["rank2", "--b", "2", "--c", "2", "--field", "fp:5"])
        assert code == 0
        doc = json.loads(out)
        assert len(doc["deep_points"]) == 4
        assert all(e["verified"] for e in doc["deep_points"])
        assert doc["deep_points"][0]["window"]["0"] == "0 mod 5"

    def test_rank2_with_frozens(self):
        code, out = run_cli(
            ["rank2", "--b", "2", "--c", "2", "--e1", "1", "--e2", "0", "--field", "fp:5"]
        )
        assert code == 0
        doc = json.loads(out)
        assert doc["spec"] == {"b": 2, "c": 2, "f": 1, "e1": [1], "e2": [0]}
        assert len(doc["deep_points"]) == 12
        assert all(e["verified"] for e in doc["deep_points"])

    def test_markov_enumerate(self):
        code, out = run_cli(["markov", "enumerate", "--field", "fp:5"])
        assert code == 0
        assert json.loads(out)["count"] == 29

    def test_markov_verify_with_trace(self):
        code, out = run_cli(
            ["markov", "verify", "--point", "1,1,1,3", "--depth", "4", "--trace"]
        )
        assert code == 0
        doc = json.loads(out)
        assert doc["passed"] and doc["nodes_visited"] == 1 + 3 * (2**4 - 1)
        assert doc["markov_element"][""] == "3"

    def test_surface_invariants(self):
        path = os.path.join(DATA, "genus1.json")
        code, out = run_cli(["surface", "invariants", "--surface", path])
        assert code == 0
        doc = json.loads(out)
        assert (doc["genus"], doc["boundary_components"], doc["marked_points"]) == (1, 1, 2)

    def test_surface_components_from_file(self):
        path = os.path.join(DATA, "annulus21.json")
        code, out = run_cli(["surface", "components", "--surface", path])
        assert code == 0
        assert "0" in out

    def test_surface_deep_fixture(self):
        code, out = run_cli(
            [
                "surface",
                "deep",
                "--surface",
                os.path.join(DATA, "annulus22.json"),
                "--fixture",
                os.path.join(DATA, "annulus22_deep.json"),
                "--steps",
                "60",
                "--seed",
                "4",
            ]
        )
        assert code == 0
        doc = json.loads(out)
        assert doc["passed"] and doc["undetermined_values"] == 0

    def test_error_exit_code(self):
        code, _ = run_cli(["polygon", "from-edges", "--edges", "1,1,1,1"])
        assert code == 1  # all-ones square violates the product condition
