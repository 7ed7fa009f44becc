from fractions import Fraction

from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from multisum.exact import GaussianRational
from multisum.instance import ProblemInstance

settings.register_profile("default", max_examples=100, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

rationals = st.builds(Fraction, st.integers(-12, 12), st.integers(1, 9))
gaussians = st.builds(GaussianRational, rationals, rationals)
nonzero_gaussians = gaussians.filter(bool)


@st.composite
def instances(draw, m_max=3, a_max=4, with_n=True, zero_ok=True):
    """Small instances with Gaussian weights and y present."""
    m = draw(st.integers(1, m_max))
    a = draw(st.lists(st.integers(0, a_max), min_size=m, max_size=m))
    c = [draw(st.integers(0, ai + 1 if zero_ok else ai)) for ai in a]
    x = draw(st.lists(gaussians, min_size=m, max_size=m))
    y = draw(st.lists(gaussians, min_size=m, max_size=m))
    n = draw(st.integers(0, sum(a) + 1)) if with_n else None
    return ProblemInstance.build(a, c, x, n, y)


# -- acceptance reporting ---------------------------------------------------

ACCEPTANCE_RESULTS = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, (ok, detail) in ACCEPTANCE_RESULTS.items():
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
