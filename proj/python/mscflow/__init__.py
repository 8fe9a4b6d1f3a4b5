"""Python access to the mscflow core."""

import json

from . import _core
from ._core import MscflowError

__all__ = ["MscflowError", "check", "project", "enumerate", "verify", "run", "render"]


def check(workflow, actions=""):
    """Diagnostics of a workflow source, as dicts. Empty when well typed."""
    return json.loads(_core.check(workflow, actions))


def project(workflow, actions=""):
    """Local program text per lifeline."""
    return json.loads(_core.project(workflow, actions))


def enumerate(workflow, unroll=1):
    """Traces of the bounded global semantics."""
    return json.loads(_core.enumerate(workflow, unroll))


def verify(workflow, actions="", unroll=1):
    return json.loads(_core.verify(workflow, actions, unroll))


def run(workflow, actions, inputs, script):
    """Runs the projection with a scripted backend (dict, same format as script files)."""
    return json.loads(_core.run_script(workflow, actions, json.dumps(inputs), json.dumps(script)))


def render(trace):
    return _core.render(json.dumps(trace))
