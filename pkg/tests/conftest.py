import numpy as np
import pytest

from optoent import SystemParams, build_model, solve_lyapunov
from optoent.sweep import FIGURE_BASE


@pytest.fixture
def fig2_params():
    """Figure 2 base rates with g2 = 1.9, g3 = 0.8, T = 300 mK."""
    return FIGURE_BASE.replace(g2=1.9, g3=0.8)


@pytest.fixture
def equal_params():
    return FIGURE_BASE.replace(g2=2.0, g3=0.8)


@pytest.fixture
def fig2_covariance(fig2_params):
    return solve_lyapunov(build_model(fig2_params))


def two_mode_squeezed(r):
    ch, sh = np.cosh(2 * r) / 2, np.sinh(2 * r) / 2
    v = np.zeros((4, 4))
    v[:2, :2] = v[2:, 2:] = ch * np.eye(2)
    v[:2, 2:] = v[2:, :2] = sh * np.diag([1.0, -1.0])
    return v


def random_params(rng):
    """Rates log-uniform within one decade of the figure values, g2 below 0.95 G'."""
    def lu(x):
        return float(x * 10 ** rng.uniform(-1, 1))

    kappa = lu(0.02)
    p = SystemParams(omega_m=lu(10), gamma_m=lu(1e-4), kappa1=kappa, kappa2=kappa,
                     kappa3=lu(0.5), g1=lu(2), g2=0.0, g3=lu(0.8), temperature=lu(0.3))
    g_prime = np.sqrt(p.g1 ** 2 + 2 * kappa / p.kappa3 * p.g3 ** 2)
    return p.replace(g2=float(rng.uniform(0, 0.95 * g_prime)))


_VERDICTS = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_VERDICTS] = []


@pytest.fixture
def verdict(request):
    """Record and print one PASS/FAIL line for an acceptance criterion, then assert it."""
    lines = request.config.stash[_VERDICTS]

    def record(number, ok, detail):
        line = f"{'PASS' if ok else 'FAIL'} criterion {number:>2}: {detail}"
        lines.append((number, line))
        print(line)
        assert ok, line
    return record


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_VERDICTS, [])
    if lines:
        terminalreporter.write_sep("=", "acceptance criteria")
        for _, line in sorted(lines):
            terminalreporter.write_line(line)
