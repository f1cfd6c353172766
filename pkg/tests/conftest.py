import functools
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

from rlplift.corpus import path  # noqa: E402
from rlplift.grounder import ground  # noqa: E402
from rlplift.lang import load_rlp  # noqa: E402
from rlplift.logkb import evaluate, load_logkb  # noqa: E402
from rlplift.lp import to_dual_form  # noqa: E402

# (model, knowledge base) pairs small enough for exact arithmetic everywhere
SMALL_PAIRS = [
    ("flow.rlp", "flow.lkb"),
    ("toy.rlp", "toy.lkb"),
    ("mdp.rlp", "grid5_1goal.lkb"),
    ("mdp.rlp", "grid5_4goal.lkb"),
    ("map_pairwise.rlp", "smokers_grid5.lkb"),
    ("map_triplewise.rlp", "smokers.lkb"),
    ("svm.rlp", "mckay.lkb"),
    ("tc_svm.rlp", "mckay.lkb"),
    ("svm.rlp", "cora_mini.lkb"),
]


@functools.lru_cache(maxsize=None)
def kb_of(lkb: str):
    return evaluate(load_logkb(path(lkb)))


@functools.lru_cache(maxsize=None)
def model_of(rlp: str):
    return load_rlp(path(rlp))


@functools.lru_cache(maxsize=None)
def ground_of(rlp: str, lkb: str):
    return ground(model_of(rlp), kb_of(lkb))


@functools.lru_cache(maxsize=None)
def dual_of(rlp: str, lkb: str):
    return to_dual_form(ground_of(rlp, lkb))


@pytest.fixture
def toy_dual():
    return dual_of("toy.rlp", "toy.lkb")


@pytest.fixture
def flow_dual():
    return dual_of("flow.rlp", "flow.lkb")


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for k in sorted(results):
            terminalreporter.write_line(results[k])
