import pytest

from imcmoead.algorithm import AlgoConfig, run
from imcmoead.core import Problem, get_problem, register_problem


def _explode(x):
    raise RuntimeError("evaluation failed")


# a problem whose every evaluation raises, for failure-path tests
register_problem("ALWAYS-FAILS", Problem("ALWAYS-FAILS", 2, 1, 0, 0, [0.0], [1.0], _explode))

_ACCEPTANCE: list[tuple[int, str, str]] = []


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(n, title): acceptance criterion n")


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    props = dict(report.user_properties)
    if "acceptance" not in props:
        return
    n, title = props["acceptance"]
    _ACCEPTANCE.append((n, title, "PASS" if report.passed else "FAIL"))


def pytest_collection_modifyitems(items):
    for item in items:
        m = item.get_closest_marker("acceptance")
        if m is not None:
            item.user_properties.append(("acceptance", m.args))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n, title, outcome in sorted(_ACCEPTANCE):
        terminalreporter.write_line(f"[{outcome}] criterion {n}: {title}")


_RUN_CACHE: dict = {}


@pytest.fixture(scope="session")
def cached_run():
    """Memoized ``run`` keyed by (problem, N, max_fe, seed), with the
    per-generation feasibility trace of every slot."""

    def _run(problem: str, N: int, max_fe: int, seed: int):
        key = (problem, N, max_fe, seed)
        if key not in _RUN_CACHE:
            trace = []
            pop, stats = run(
                get_problem(problem),
                AlgoConfig(N=N, max_fe=max_fe, seed=seed),
                on_generation=lambda st, p: trace.append([s.feasible for s in p]),
            )
            _RUN_CACHE[key] = (pop, stats, trace)
        return _RUN_CACHE[key]

    return _run
