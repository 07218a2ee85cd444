"""Positivity testing, tracial decompositions and uncertainty checks for maps on matrix algebras."""

import json

from . import _opmap
from ._opmap import InputError, Map, NumericalError

__all__ = [
    "InputError",
    "Map",
    "NumericalError",
    "decompose",
    "gallery_list",
    "gallery_run",
    "load_map",
    "run_cli",
    "test_positive",
]


def load_map(spec):
    """Build a registered map from a spec dict, JSON string or file path."""
    if isinstance(spec, dict):
        return Map.from_spec(json.dumps(spec))
    text = str(spec)
    if not text.lstrip().startswith("{"):
        with open(text) as f:
            text = f.read()
    return Map.from_spec(text)


def test_positive(map, notion="type2(1)", trials=1000, seed=0xC5A1, tol=1e-9, threads=1, real_inputs=False):
    return json.loads(_opmap.test_positive(map, notion, trials, seed, tol, threads, real_inputs))


test_positive.__test__ = False  # keep pytest from collecting it


def decompose(map, degree=-1, samples=50, seed=0xC5A1, threads=1):
    return json.loads(_opmap.decompose(map, degree, samples, seed, threads))


def gallery_list():
    return json.loads(_opmap.gallery_list())


def gallery_run(case_id, params=None, seed=0xC5A1, trials=-1, threads=1):
    return json.loads(_opmap.gallery_run(case_id, json.dumps(params or {}), seed, trials, threads))


def run_cli(*args):
    """Run the command-line tool in-process. Returns (exit_code, stdout, stderr)."""
    return _opmap.run_cli([str(a) for a in args])
