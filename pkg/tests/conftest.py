from dataclasses import replace
from importlib.resources import files

import pytest

from infmln import compile_program, parse_program
from infmln.herbrand import parse_ground_atom

FIXTURES = files("infmln") / "fixtures"


def fixture_text(name):
    return (FIXTURES / name).read_text()


def load(name, weight=None):
    p = parse_program(fixture_text(name), name)
    if weight is not None:
        p = replace(p, formulas=tuple(replace(f, weight=weight) for f in p.formulas))
    return compile_program(p)


def program(text):
    return compile_program(parse_program(text))


def nest(k, f="s", seed="0"):
    return f"{f}(" * k + seed + ")" * k


def atom(p, text):
    return parse_ground_atom(text, p.signature)


def lattice_atom(p, i, j):
    return atom(p, f"Q({nest(i)}, {nest(j)})")


def chain_atom(p, i):
    return atom(p, f"Q({nest(i)})")


# -- acceptance summary ---------------------------------------------------------

_criteria = {}


@pytest.fixture
def criterion(request):
    """Record one acceptance criterion; a pass/fail line is printed at the end of the run."""
    state = {}

    def record(name, detail=""):
        state["name"], state["detail"] = name, detail

    yield record
    rep = getattr(request.node, "rep_call", None)
    ok = rep is not None and rep.passed
    if "name" in state:
        _criteria[state["name"]] = (ok, state.get("detail", ""))


@pytest.hookimpl(hookwrapper=True, tryfirst=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call":
        item.rep_call = rep


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_criteria, key=lambda n: int(n.split()[0][2:])):
        ok, detail = _criteria[name]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}  {detail}")
