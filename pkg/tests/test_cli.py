import json
import random
import subprocess
import sys

import pytest

from isovolcano.classgroup import kronecker_class_number
from isovolcano.cli import export_chart, main
from isovolcano.errors import InvalidArgument
from isovolcano.ff_poly import PrimeField
from isovolcano.hilbert import find_curve_with_trace
from isovolcano.volcano import map_volcano


@pytest.fixture
def run(phis, cache_dir, capsys):
    def _run(*argv):
        code = main([argv[0], "--cache-dir", str(cache_dir), *argv[1:]])
        out, err = capsys.readouterr()
        return code, out, err
    return _run


def test_census_json(run):
    code, out, _ = run("census", "-p", "1009", "-l", "3", "--json")
    assert code == 0
    data = json.loads(out)["census"]
    assert data["p"] == 1009 and data["ell"] == 3
    assert data["ordinary"] + data["supersingular"] == data["components"]


def test_census_trace_only(run):
    code, out, _ = run("census", "-p", "4451", "-l", "5", "--trace", "52", "--class-only", "--json")
    assert code == 0
    (trace,) = json.loads(out)["traces"]
    assert trace["vertices"] == kronecker_class_number(52 * 52 - 4 * 4451)
    assert {s["conductor"] for s in trace["inventory"]["52"]} == {1, 2}


def test_floor_and_level(run):
    code, out, _ = run("floor", "-p", "4451", "-l", "5", "-j", "901", "--shortest", "--json")
    assert code == 0 and json.loads(out)["length"] == 1
    code, out, _ = run("level", "-p", "4451", "-l", "5", "-j", "3188", "--json")
    assert code == 0 and json.loads(out) == {"j": 3188, "level": 1, "depth": 1}


def test_map_writes_json_and_dot(run, tmp_path):
    target = tmp_path / "chart.dot"
    code, out, _ = run("map", "-p", "4451", "-l", "5", "-j", "901", "--format", "dot",
                       "-o", str(target))
    assert code == 0 and "written to" in out
    assert target.read_text().startswith("digraph")
    code, out, _ = run("map", "-p", "4451", "-l", "5", "-j", "901")
    assert json.loads(out)["depth"] == 1


def test_ss_test(run):
    code, out, _ = run("ss-test", "-p", "4451", "-j", "0", "--json")
    assert code == 0 and json.loads(out)["supersingular"] is (4451 % 3 == 2)
    code, out, _ = run("ss-test", "-p", "4451", "-j", "901")
    assert code == 0 and out.strip() == "ordinary"


def test_hilbert_and_classgroup(run):
    code, out, _ = run("hilbert", "-D", "-23", "--json")
    assert code == 0
    assert json.loads(out)["coefficients"] == [12771880859375, -5151296875, 3491750, 1]
    code, out, _ = run("hilbert", "-D", "-151", "--mod", "4451", "--json")
    assert code == 0 and json.loads(out)["degree"] == 7
    code, out, _ = run("classgroup", "-D", "-79447", "--json")
    data = json.loads(out)
    assert code == 0 and data["h"] == 100 and data["minimal_generator_norm"] == 19


def test_modpoly_output(run, tmp_path):
    target = tmp_path / "phi3.txt"
    code, out, _ = run("modpoly", "-l", "3", "-o", str(target), "--json")
    assert code == 0 and json.loads(out)["terms"] > 0
    assert target.read_text().startswith("modpoly ell=3")


def test_endoring_with_relation_file(run, tmp_path):
    rel = tmp_path / "rels.txt"
    rel.write_text("# discriminates 13 for D_K = -11\n3:3:+\n")
    E = find_curve_with_trace(PrimeField(2003), 24, random.Random(0))
    args = ["-p", "2003", "-a", str(int(E.a)), "-b", str(int(E.b)), "--json"]
    code, out, _ = run("endoring", *args, "--relations", str(rel), "--budget", "7")
    assert code == 0
    data = json.loads(out)
    assert data["v"] == 26 and data["unresolved"] == []
    code, out, _ = run("endoring", *args, "--budget", "7")
    assert json.loads(out)["unresolved"] == [13]


@pytest.mark.parametrize("argv,code", [
    (["floor", "-p", "4450", "-l", "5", "-j", "1"], 2),
    (["floor", "-p", "4451", "-l", "4", "-j", "1"], 2),
    (["hilbert", "-D", "-5"], 2),
    (["census", "-p", "4451", "-l", "5", "--class-only"], 2),
    (["census", "-p", "4194319", "-l", "3", "--no-ss-check"], 3),
    (["ss-test", "-p", "4451", "-j", "1,2,3"], 2),
])
def test_exit_codes(run, argv, code):
    got, _, err = run(*argv)
    assert got == code and err


def test_export_chart_rejects_unknown_format(phis, tmp_path):
    chart = map_volcano(phis[5], PrimeField(4451), 901)
    export_chart(chart, "json", tmp_path / "c.json")
    assert json.loads((tmp_path / "c.json").read_text())["ell"] == 5
    with pytest.raises(InvalidArgument):
        export_chart(chart, "svg", tmp_path / "c.svg")


def test_console_script_entry_point(cache_dir):
    proc = subprocess.run([sys.executable, "-m", "isovolcano.cli", "classgroup", "-D", "-23"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and "h(-23) = 3" in proc.stdout
