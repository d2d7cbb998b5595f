import pytest

from diffront.experiments import run_dense_front
from diffront.lattice import Region
from diffront.percolation import PercolationSample


def disk_sample(r_occ, r_region):
    """Deterministic sample: disk(r_occ) occupied inside region disk(r_region)."""
    reg = Region.disk(r_region)
    return PercolationSample(reg, reg.norms() <= r_occ + 1e-9)


SEED = 0
DENSE_TIMES = (2500, 10_000, 40_000)
DENSE_SEEDS = 50


def frac(flags):
    flags = list(flags)
    return sum(map(bool, flags)) / len(flags)


@pytest.fixture
def disk10():
    return disk_sample(10, 20)


@pytest.fixture(scope="session")
def rho1024():
    from diffront.walk_kernel import cumulative_kernel
    return cumulative_kernel(1024)


@pytest.fixture(scope="session")
def dense_runs():
    """Dense-phase fronts at lambda = 0.25: ``{t: [(row, front), ...]}``."""
    rows, fronts = run_dense_front(DENSE_TIMES, DENSE_SEEDS, SEED, lam=0.25,
                                   engine="poisson-field", keep_front=True)
    out = {}
    for r, f in zip(rows, fronts):
        out.setdefault(r["t"], []).append((r, f))
    return out


# one summary line per acceptance criterion, printed after the run
CRITERIA = {}


@pytest.fixture
def report():
    def put(number, ok, detail):
        CRITERIA[number] = (bool(ok), detail)
    return put


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(CRITERIA):
        ok, detail = CRITERIA[k]
        terminalreporter.write_line(f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
