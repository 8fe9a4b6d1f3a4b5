import os
import pathlib

import pytest

import mscflow

ROOT = pathlib.Path(os.environ.get("MSCFLOW_SOURCE_DIR", pathlib.Path(__file__).resolve().parents[2]))
WF = ROOT / "workflows"


def read(name):
    return (WF / name).read_text()


def test_check_clean_and_dirty():
    assert mscflow.check(read("review.msc"), read("review.act")) == []
    bad = read("review.msc").replace(
        "    msg Planner(plan) -> Executor(plan)",
        "    msg Executor(task) -> Executor(task)\n    msg Planner(plan) -> Executor(plan)",
    )
    codes = [d["code"] for d in mscflow.check(bad, read("review.act"))]
    assert "self-channel" in codes


def test_project():
    progs = mscflow.project(read("consensus.msc"), read("consensus.act"))
    assert set(progs) == {"User", "LLM1", "LLM2"}
    assert "while recv" in progs["LLM2"]


def test_enumerate_review():
    assert len(mscflow.enumerate(read("review.msc"), unroll=0)) == 2


def test_verify_passes():
    reports = mscflow.verify(read("review.msc"), read("review.act"), unroll=1)
    assert reports and all(r["verdict"] == "pass" for r in reports)


def test_run_and_render():
    import json

    script = json.loads(read("scripts/review_critique.json"))
    out = mscflow.run(read("review.msc"), read("review.act"), {"task": "deploy"}, script)
    assert out["result"] == "done; review addressed"
    assert out["events"] == 17
    chart = mscflow.render(out["trace"])
    assert chart.splitlines()[0].split() == ["Executor", "Orchestrator", "Planner", "Reviewer"]


def test_errors_raise():
    with pytest.raises(mscflow.MscflowError):
        mscflow.project("workflow broken(")
