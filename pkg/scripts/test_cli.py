"""
Test script for problem descriptors, report emission and the command line
"""

import json
import math
import sys
import tempfile
from fractions import Fraction
from pathlib import Path

import pytest
from click.testing import CliRunner

# Add parent directory to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from app.exceptions import AdelicError, DescriptorError, InfeasibleInputError
from app.main import cli
from app.services.runner import emit, emit_descriptor, parse_descriptor, run
from run_problems import run_problems

CHECK_PRODUCT = '{"command": "check-product", "value": "6/5"}'

JENSEN = """
command = "jensen"
function = "(z-1)/(z-3)"

[curve]
curve = "nevanlinna"
R = "2"
"""

DEGREE = {
    "command": "degree",
    "bundle": {"kind": "diagonal", "weights": [{"inf": -1.0}, {"p=5": "log(5)"}]},
    "element": ["1", "0"],
}

NEVANLINNA = {
    "command": "nevanlinna",
    "curve": {"curve": "nevanlinna", "R": "2"},
    "function": "z",
    "radii": ["2", "4", "8"],
}


def _report(descriptor, fmt: str = "json", csv_output=None) -> bytes:
    text = descriptor if isinstance(descriptor, str) else json.dumps(descriptor)
    return emit(run(parse_descriptor(text, fmt)), csv_output)


def test_parse_descriptor():
    print("\n" + "="*70)
    print("TEST: Descriptor parsing")
    print("="*70)

    descriptor = parse_descriptor(CHECK_PRODUCT)
    assert descriptor.command == "check-product"
    assert descriptor.curve.curve == "rational"

    nevanlinna = parse_descriptor(json.dumps(NEVANLINNA))
    assert nevanlinna.curve.R == Fraction(2)
    assert nevanlinna.curve.nodes == 4096
    assert nevanlinna.targets == ["inf"]

    toml = parse_descriptor(JENSEN, "toml")
    assert toml.command == "jensen"
    assert toml.radii is None
    print("✓ JSON and TOML descriptors validate")


def test_descriptor_errors():
    """Errors name the offending path"""
    with pytest.raises(DescriptorError) as info:
        parse_descriptor('{"command": "check-product", "value": "1", "curv": {}}')
    assert info.value.path == "curv"
    assert info.value.exit_code == 2

    with pytest.raises(DescriptorError):
        parse_descriptor('{"command": "nope"}')
    with pytest.raises(DescriptorError):
        parse_descriptor("[1, 2]")
    with pytest.raises(DescriptorError):
        parse_descriptor("command = ", "toml")
    with pytest.raises(DescriptorError):
        parse_descriptor(CHECK_PRODUCT, "yaml")

    with pytest.raises(InfeasibleInputError):
        parse_descriptor(json.dumps({
            "command": "hn",
            "bundle": {"kind": "lattice-hermitian", "lattice_basis": [[1, 0], [0, 1]], "gram": [[1, 2], [2, 1]]},
        }))


def test_descriptor_round_trip():
    """parse(emit(parse(x))) == parse(x)"""
    for text, fmt in ((CHECK_PRODUCT, "json"), (JENSEN, "toml"),
                      (json.dumps(DEGREE), "json"), (json.dumps(NEVANLINNA), "json")):
        descriptor = parse_descriptor(text, fmt)
        assert parse_descriptor(emit_descriptor(descriptor)) == descriptor


def test_check_product_report():
    report = json.loads(_report(CHECK_PRODUCT))
    assert report["command"] == "check-product"
    assert report["results"]["total"] == 0.0
    assert report["results"]["exact"] is True
    assert report["inputs"]["value"] == "6/5"
    assert report["warnings"] == []


def test_jensen_report():
    report = json.loads(_report(JENSEN, "toml"))
    assert report["results"]["total"] == pytest.approx(-math.log(3), abs=1e-8)
    assert report["results"]["reference"] == pytest.approx(-1.0986122886681098)


def test_degree_report():
    report = json.loads(_report(DEGREE))
    results = report["results"]
    assert results["rank"] == 2
    assert results["degree"] == pytest.approx(1.0 - math.log(5))
    assert results["element_degree"] == pytest.approx(1.0, abs=1e-12)


def test_csv_output():
    print("\n" + "="*70)
    print("TEST: CSV tables")
    print("="*70)

    lines = _report(NEVANLINNA).decode("utf-8").splitlines()
    assert lines[0] == "r,N,N_k,m,T,fs_height,gap"
    assert len(lines) == 4
    assert lines[1].startswith("2,")

    grid = dict(NEVANLINNA, command="jensen", radii=["1", "2"], function="z - 1")
    lines = _report(grid).decode("utf-8").splitlines()
    assert lines[0] == "R,total,reference,gap,error"
    assert "perturb R" in lines[1]

    forced = json.loads(_report(NEVANLINNA, csv_output=False))
    assert len(forced["results"]["rows"]) == 3
    print("✓ grid commands default to CSV, --json forces JSON")


def test_determinism():
    first = _report(json.dumps(NEVANLINNA), csv_output=False)
    second = _report(json.dumps(NEVANLINNA), csv_output=False)
    assert first == second


def test_cli_exit_codes():
    """0 success, 2 descriptor error, 3 numerical guard, 4 infeasible input"""
    runner = CliRunner()

    ok = runner.invoke(cli, ["--format", "json"], input=CHECK_PRODUCT)
    assert ok.exit_code == 0
    assert json.loads(ok.output)["results"]["exact"] is True

    bad = runner.invoke(cli, [], input='{"command": "check-product"}')
    assert bad.exit_code == 2
    assert "error:" in bad.output

    on_circle = dict(NEVANLINNA, command="jensen", function="z - 1", curve={"curve": "nevanlinna", "R": 1})
    del on_circle["radii"]
    guard = runner.invoke(cli, [], input=json.dumps(on_circle))
    assert guard.exit_code == 3

    indefinite = {
        "command": "hn",
        "bundle": {"kind": "lattice-hermitian", "lattice_basis": [[1, 0], [0, 1]], "gram": [[1, 2], [2, 1]]},
    }
    infeasible = runner.invoke(cli, [], input=json.dumps(indefinite))
    assert infeasible.exit_code == 4


def test_cli_files():
    runner = CliRunner()
    with runner.isolated_filesystem():
        Path("jensen.toml").write_text(JENSEN, encoding="utf-8")
        result = runner.invoke(cli, ["--in", "jensen.toml", "--out", "report.json"])
        assert result.exit_code == 0
        report = json.loads(Path("report.json").read_text(encoding="utf-8"))
        assert report["command"] == "jensen"

    version = runner.invoke(cli, ["--version"])
    assert version.exit_code == 0
    assert "1.0.0" in version.output


def test_problem_corpus():
    """Every shipped descriptor runs and leaves a report"""
    problems = Path(__file__).parent.parent / "data" / "problems"
    with tempfile.TemporaryDirectory() as tmp:
        reports = Path(tmp)
        assert run_problems(problems, reports)
        written = {p.stem for p in reports.iterdir()}
        expected = {p.stem for p in problems.iterdir() if p.suffix in (".json", ".toml")}
        assert written == expected
        assert (reports / "jensen_family.csv").exists()
        assert (reports / "product_six_fifths.json").exists()


def main():
    """Run every test in this file and print a summary"""
    tests = [
        test_parse_descriptor,
        test_descriptor_errors,
        test_descriptor_round_trip,
        test_check_product_report,
        test_jensen_report,
        test_degree_report,
        test_csv_output,
        test_determinism,
        test_cli_exit_codes,
        test_cli_files,
        test_problem_corpus,
    ]
    failed = 0
    for test in tests:
        try:
            test()
            print(f"✓ {test.__name__}")
        except (AssertionError, AdelicError) as e:
            failed += 1
            print(f"✗ {test.__name__}: {e}")

    print("\n" + "="*70)
    print(f"TEST SUMMARY: {len(tests) - failed}/{len(tests)} passed")
    print("="*70 + "\n")
    return failed == 0


if __name__ == "__main__":
    sys.exit(0 if main() else 1)
