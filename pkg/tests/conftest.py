import numpy as np
import pytest

from fracdim.experiments import CATALOG
from fracdim.surfaces import make_surface

CRITERIA = {
    "test_criterion_1": "closed-form operator values",
    "test_criterion_2": "transformed quadrature vs direct oracle",
    "test_criterion_3": "separable Hadamard identity",
    "test_criterion_4": "Katugampola to Hadamard limit",
    "test_criterion_5": "dimension preservation, Katugampola",
    "test_criterion_6": "dimension preservation, Hadamard",
    "test_criterion_7": "box-count sandwich",
    "test_criterion_8": "Weierstrass dimension band",
    "test_criterion_9": "invariant suite",
}


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def catalog():
    return [make_surface(spec) for spec in CATALOG]


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    outcomes = {}
    for key in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(key, []):
            if "test_acceptance.py" not in rep.nodeid or rep.when != "call" and key != "error":
                continue
            name = rep.nodeid.split("::")[-1].split("[")[0]
            for prefix in CRITERIA:
                if name.startswith(prefix + "_"):
                    ok = key == "passed" and outcomes.get(prefix, True)
                    outcomes[prefix] = ok
    if not outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for prefix, text in CRITERIA.items():
        if prefix in outcomes:
            status = "PASS" if outcomes[prefix] else "FAIL"
            terminalreporter.write_line(f"{status}  {prefix[len('test_'):]}: {text}")
