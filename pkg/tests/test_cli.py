from __future__ import annotations

import json
import shutil
import subprocess
import sys

import pytest

from fddevs.cli import main
from fddevs.core import Coupling
from fddevs.sim import EventKind, read_jsonl
from fddevs.uml import parse_xmi, registry_from_uml
from fddevs.xfd import load_model_tree, read_model, validate_document


@pytest.fixture
def efp_dir(tmp_path, data):
    target = tmp_path / "efp"
    shutil.copytree(data / "efp", target)
    return target


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


# --------------------------------------------------------------------------
# validate


def test_validate_clean(capsys, efp_dir):
    code, out, _ = run(capsys, "validate", efp_dir / "EF.xml")
    assert code == 0 and out.strip().endswith(": ok")


def test_validate_missing_model_name(capsys, broken_dir):
    code, out, _ = run(capsys, "validate", broken_dir / "01_missing_model_name__MissingAttribute.xml")
    assert code == 1 and "MissingAttribute" in out


def test_validate_kind_mismatch(capsys, efp_dir):
    code, out, _ = run(capsys, "validate", "--kind", "atomic", efp_dir / "EF.xml")
    assert code == 1 and "KindMismatch" in out


def test_validate_json(capsys, broken_dir):
    code, out, _ = run(capsys, "validate", "--json", broken_dir / "05_self_coupling__SelfCoupling.xml")
    report = json.loads(out)
    assert code == 1 and report["valid"] is False
    assert {"code", "path", "message"} <= set(report["violations"][0])


def test_validate_missing_file(capsys, tmp_path):
    code, _, err = run(capsys, "validate", tmp_path / "nope.xml")
    assert code == 1 and "error" in err


# --------------------------------------------------------------------------
# simulate


def test_simulate_efp(capsys, efp_dir):
    code, out, err = run(capsys, "simulate", efp_dir / "EFP.xml", "--until", "30")
    events = read_jsonl(out)
    assert code == 0
    assert [e.t for e in events if e.kind is EventKind.OUTPUT] == [10, 15, 20, 25, 30]
    assert "terminationTime=30" in err


def test_simulate_csv_to_file(capsys, efp_dir, tmp_path):
    target = tmp_path / "out" / "trace.csv"
    code, out, _ = run(capsys, "simulate", efp_dir / "EFP.xml", "--until", "10", "--trace", "csv", "--out", target)
    assert code == 0 and out == ""
    assert target.read_text().splitlines()[0] == "t,model,kind,port,label,before,after"


@pytest.mark.parametrize("until", ["0", "100"])
def test_simulate_passive(capsys, tmp_path, until):
    (tmp_path / "P.xml").write_text(
        "<Atomic modelName='P' host='h'><inports/><states><state>idle</state></states><outports/>"
        "<deltint/><delttext/><timeAdvance/><lamdas/></Atomic>"
    )
    code, out, err = run(capsys, "simulate", tmp_path / "P.xml", "--until", until, "--seedless")
    assert code == 0
    assert [e.kind for e in read_jsonl(out)] == [EventKind.INIT]
    assert f"terminationTime={until}" in err


def test_simulate_is_deterministic(capsys, efp_dir):
    first = run(capsys, "simulate", efp_dir / "EFP.xml", "--until", "100")
    second = run(capsys, "simulate", efp_dir / "EFP.xml", "--until", "100")
    assert first == second


def test_simulate_missing_child(capsys, tmp_path, data):
    shutil.copy(data / "efp" / "EFP.xml", tmp_path / "EFP.xml")
    code, _, err = run(capsys, "simulate", tmp_path / "EFP.xml", "--until", "10")
    assert code == 1 and "EF.xml" in err


# --------------------------------------------------------------------------
# transform


def test_transform_scxml_to_devs(capsys, data, tmp_path):
    code, out, _ = run(capsys, "transform", "--from", "scxml", "--to", "devs", data / "scxml" / "m1.scxml",
                       "--out-dir", tmp_path)
    assert code == 0 and out.strip().endswith("m1.xml")
    code, out, _ = run(capsys, "simulate", tmp_path / "m1.xml", "--until", "20")
    assert [e.t for e in read_jsonl(out) if e.kind is EventKind.OUTPUT] == [5]


def test_transform_xmi_to_devs_matches_fixtures(capsys, data, tmp_path):
    code, out, _ = run(capsys, "transform", "--from", "xmi", "--to", "devs", data / "uml" / "efp.xmi",
                       "--out-dir", tmp_path)
    assert code == 0 and len(out.split()) == 5
    for p in (data / "efp").glob("*.xml"):
        assert (tmp_path / p.name).read_text() == p.read_text()


def test_transform_devs_to_xmi(capsys, efp_dir, tmp_path):
    code, out, _ = run(capsys, "transform", "--from", "devs", "--to", "xmi", efp_dir / "EFP.xml",
                       "--out-dir", tmp_path / "x")
    assert code == 0
    reg = registry_from_uml(parse_xmi((tmp_path / "x" / "EFP.xmi").read_bytes()))
    assert reg == load_model_tree(efp_dir / "EFP.xml")


def test_transform_bad_scxml(capsys, tmp_path):
    (tmp_path / "bad.scxml").write_text("<scxml><state id='a'><onentry><send event='x'/></onentry></state></scxml>")
    code, _, err = run(capsys, "transform", "--from", "scxml", "--to", "devs", tmp_path / "bad.scxml",
                       "--out-dir", tmp_path)
    assert code == 1 and "error" in err


# --------------------------------------------------------------------------
# flatten


def test_flatten_efp(capsys, efp_dir, tmp_path):
    target = tmp_path / "flat" / "EFP.xml"
    code, out, _ = run(capsys, "flatten", efp_dir / "EFP.xml", "--out", target)
    assert code == 0
    flat = read_model(target)
    assert Coupling("EF/Generator", "out", "Processor", "in") in flat.couplings
    for p in out.split():
        assert validate_document(open(p, "rb").read()) == []
    flat_run = run(capsys, "simulate", target, "--until", "100")
    deep_run = run(capsys, "simulate", efp_dir / "EFP.xml", "--until", "100")
    assert flat_run == deep_run


def test_flatten_flat_model(capsys, efp_dir, tmp_path):
    run(capsys, "flatten", efp_dir / "EFP.xml", "--out", tmp_path / "a" / "EFP.xml")
    run(capsys, "flatten", tmp_path / "a" / "EFP.xml", "--out", tmp_path / "b" / "EFP.xml")
    once = read_model(tmp_path / "a" / "EFP.xml")
    twice = read_model(tmp_path / "b" / "EFP.xml")
    assert set(once.couplings) == set(twice.couplings)


# --------------------------------------------------------------------------
# inspect and usage


def test_inspect_tree_json(capsys, efp_dir):
    code, out, _ = run(capsys, "inspect", "--tree", "--json", efp_dir / "EFP.xml")
    info = json.loads(out)
    assert code == 0
    assert info["kind"] == "coupled" and info["dialect"] == "coupled-schema"
    assert info["tree"] == ["EFP", "EF", "Generator", "Transducer", "Processor"]


def test_inspect_atomic_text(capsys, efp_dir):
    code, out, _ = run(capsys, "inspect", efp_dir / "Generator.xml")
    assert code == 0 and "initial: active" in out


@pytest.mark.parametrize("argv", [[], ["simulate", "x.xml"], ["validate", "x.xml", "--bogus"], ["frobnicate"]])
def test_usage_errors_exit_2(argv):
    with pytest.raises(SystemExit) as info:
        main(argv)
    assert info.value.code == 2


def test_module_entry_point(efp_dir):
    proc = subprocess.run(
        [sys.executable, "-m", "fddevs", "validate", str(efp_dir / "EFP.xml")], capture_output=True, text=True
    )
    assert proc.returncode == 0
