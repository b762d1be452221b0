import pytest

from sdemoments import OdeOracleConfig, compile_generator, ode_oracle, preset


@pytest.fixture(scope="session")
def ou():
    model, origin, _ = preset("ou")
    return compile_generator(model, origin)


@pytest.fixture(scope="session")
def vdp():
    model, origin, _ = preset("vdp")
    return compile_generator(model, origin)


@pytest.fixture(scope="session")
def vdp_exact(vdp):
    """RK4 reference for E[(X1-0.5)(X2-1)] at T=0.1."""
    return ode_oracle(vdp, (1, 1), OdeOracleConfig(T=0.1, cutoff=15, dt=1e-6))


# one summary line per acceptance criterion, filled in by test_acceptance.py
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
