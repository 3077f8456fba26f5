import io
import json

import pytest

from kneserdefect import cli
from kneserdefect.core import InternalInvariantViolation, complete_k_family, stable_subfamily
from kneserdefect.defect import DefectCertificate, is_valid_certificate
from kneserdefect.kneser import Coloring, is_proper


def call(*argv):
    out = io.StringIO()
    code = cli.run(list(argv), out=out)
    return code, out.getvalue()


def lines(text):
    return [json.loads(x) for x in text.splitlines()]


def test_chi_complete():
    code, text = call("chi", "--complete", "6", "2", "--s", "2", "--r", "2", "--greedy", "--edges")
    data = lines(text)[0]
    assert code == 0 and data["schema"] == 1
    assert data["chi"] == 4 and data["vertices"] == 10
    assert data["greedy"]["t"] == 4 and data["edges"]


def test_chi_degenerate():
    code, text = call("chi", "--complete", "4", "3", "--s", "2")
    assert code == 0 and lines(text)[0]["chi"] == 0


def test_ecd_certificate_reingests():
    code, text = call("ecd", "--complete", "5", "2", "--r", "2")
    data = lines(text)[0]
    assert code == 0 and data["defect"] == 3
    cert = DefectCertificate.from_json(5, data)
    assert is_valid_certificate(complete_k_family(5, 2), cert, 2)


def test_stable_subcommand():
    code, text = call("stable", "--complete", "5", "2", "--s", "2", "--variant", "cyclic")
    assert code == 0 and len(lines(text)[0]["sets"]) == 5


@pytest.mark.parametrize(
    "argv, key, value",
    [
        (["thm1", "--complete", "6", "2", "--s", "2", "--r", "2"], "bound", 4),
        (["thm2", "--complete", "6", "2", "--s", "2", "--p", "2"], "bound", 4),
        (["conjecture", "--complete", "5", "2", "--s", "2", "--r", "2", "--variant", "cyclic"], "chi", 3),
    ],
)
def test_bound_checks(argv, key, value):
    code, text = call(*argv)
    data = lines(text)[0]
    assert code == 0 and data[key] == value and data["holds"]
    assert "seconds" not in data


def test_csv_and_timings():
    code, text = call("thm1", "--complete", "6", "2", "--s", "2", "--r", "2", "--format", "csv")
    header, row = text.splitlines()
    assert code == 0 and header == "n,k_or_spec,s,r_or_p,chi,bound,holds,seconds"
    assert row.startswith("6,k=2,2,2,4,4,True,")
    code, text = call("thm1", "--complete", "6", "2", "--s", "2", "--r", "2", "--timings")
    assert "seconds" in lines(text)[0]


def test_output_is_byte_identical():
    argv = ["thm2", "--random", "4", "--n", "6", "--members", "8", "--s", "2", "--p", "3"]
    assert call(*argv) == call(*argv)
    argv = ["chi", "--complete", "7", "2", "--s", "2"]
    assert call(*argv) == call(*argv)


def test_audits():
    code, text = call("tucker-audit", "--complete", "4", "2", "--s", "2")
    data = lines(text)[0]
    assert code == 0 and data["violations"] == [] and data["proper"]
    code, text = call("zptucker-audit", "--complete", "5", "2", "--s", "2", "--p", "3")
    assert code == 0 and lines(text)[0]["violations"] == []


def test_audit_with_supplied_coloring(tmp_path):
    F = complete_k_family(5, 2)
    Fs = stable_subfamily(F, 2)
    path = tmp_path / "c.json"
    path.write_text(json.dumps(Coloring(Fs, (1,) * len(Fs), 1).to_json()))
    code, text = call("tucker-audit", "--complete", "5", "2", "--s", "2", "--coloring", str(path))
    data = lines(text)[0]
    assert code == 0 and not data["proper"] and data["violations"]


def test_chi_coloring_reingests(tmp_path):
    _, text = call("chi", "--complete", "7", "2", "--s", "2")
    col = lines(text)[0]["coloring"]
    Fs = stable_subfamily(complete_k_family(7, 2), 2)
    assert is_proper(Fs, Coloring.from_json(Fs, col), 2)
    path = tmp_path / "c.json"
    path.write_text(json.dumps(col))
    code, text = call("tucker-audit", "--complete", "7", "2", "--s", "2", "--coloring", str(path))
    assert code == 0 and lines(text)[0]["violations"] == []


def test_lemma_witness():
    code, text = call("lemma-witness", "--complete", "8", "2")
    data = lines(text)[0]
    assert code == 0 and data["proper"] and data["accounting"]["consistent"]


def test_family_file(tmp_path):
    path = tmp_path / "f.json"
    path.write_text(json.dumps({"n": 5, "sets": [[1, 3], [2, 4], [3, 5], [1, 4], [2, 5]]}))
    code, text = call("chi", "--family", str(path), "--s", "2")
    assert code == 0 and lines(text)[0]["chi"] == 3
    path.write_text(json.dumps({"n": 5, "sets": [[1, 3], [3, 1]]}))
    assert call("chi", "--family", str(path))[0] == 1
    path.write_text("not json")
    assert call("chi", "--family", str(path))[0] == 1


def test_scan_summary_and_jobs():
    argv = ["scan", "--n", "4", "--max-members", "2", "--s", "2", "--r", "2", "--check", "thm1"]
    code, text = call(*argv)
    summary = lines(text)[-1]["summary"]
    assert code == 0 and summary == {"checked": 120, "complete": True, "failures": 0, "total": 120}
    rnd = ["scan", "--generator", "random", "--n", "6", "--n-min", "4", "--max-members", "8",
           "--count", "60", "--seed", "2", "--s", "2", "--r", "2", "--variant", "cyclic"]
    assert call(*rnd, "--jobs", "1") == call(*rnd, "--jobs", "2")


@pytest.mark.parametrize(
    "argv",
    [
        ["chi", "--complete", "3", "4"],
        ["thm1", "--complete", "6", "2", "--s", "3", "--r", "2"],
        ["thm2", "--complete", "6", "2", "--s", "2", "--p", "4"],
        ["conjecture", "--complete", "6", "2", "--s", "2", "--r", "3"],
        ["ecd", "--complete", "4", "2"],
        ["chi"],
        ["bogus"],
    ],
)
def test_precondition_exit(argv):
    assert call(*argv)[0] == 1


def test_guard_exit():
    assert call("scan", "--n", "4", "--s", "2", "--r", "2", "--budget", "0")[0] == 2
    assert call("chi", "--complete", "8", "2", "--max-n", "6")[0] == 2
    assert call("chi", "--complete", "8", "2", "--edges", "--edge-bound", "3")[0] == 2
    assert call("tucker-audit", "--complete", "13", "2", "--s", "2")[0] == 2
    assert call("zptucker-audit", "--complete", "9", "2", "--s", "2", "--p", "3")[0] == 2


def test_internal_exit(monkeypatch):
    def broken(*a, **k):
        raise InternalInvariantViolation("forced")

    monkeypatch.setattr(cli, "ecd", broken)
    assert call("ecd", "--complete", "4", "2", "--r", "2")[0] == 3
