import pytest
from hypothesis import HealthCheck, settings

from assouad_lp import presets
from assouad_lp.spectrum import estimate_spectra

settings.register_profile(
    "repo", derandomize=True, deadline=None, database=None, print_blob=True,
    suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("repo")


@pytest.fixture(scope="session")
def preset_estimates():
    """Default-sweep estimates per preset, computed once per session."""
    cache = {}

    def get(name, **params):
        key = (name, tuple(sorted(params.items())))
        if key not in cache:
            m = presets.build_measure(name, params)
            cache[key] = estimate_spectra(m, presets.default_sweep(name, params))
        return cache[key]

    return get


# one PASS/FAIL line per acceptance criterion, repeated in the terminal summary
_ACCEPTANCE = {}


@pytest.fixture
def acceptance():
    def record(number, title, ok, detail):
        line = f"{'PASS' if ok else 'FAIL'}  criterion {number}: {title} ({detail})"
        _ACCEPTANCE[number] = line
        print(line)
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for n in sorted(_ACCEPTANCE):
            terminalreporter.write_line(_ACCEPTANCE[n])
