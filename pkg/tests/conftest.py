import pytest
from hypothesis import strategies as st

from masurelab.exactalg import Field, RationalFunc, RationalU

FIELDS = [Field(0), Field(2), Field(3), Field(5)]


@pytest.fixture(params=FIELDS, ids=str)
def field(request):
    return request.param


def rf_strategy(field: Field, max_deg: int = 2, max_exp: int = 3):
    """Small elements of k(w): (Laurent polynomial) / (1 + small polynomial)."""
    coeff = st.integers(-3, 3)

    @st.composite
    def build(draw):
        num = draw(st.lists(coeff, min_size=1, max_size=max_deg + 1))
        den_tail = draw(st.lists(coeff, min_size=0, max_size=max_deg))
        e = draw(st.integers(-max_exp, max_exp))
        f = RationalFunc(num, [1] + den_tail, field) if any(field(c) for c in [1] + den_tail) else RationalFunc(num, [1], field)
        return f * RationalFunc.monomial(1, e, field)

    return build()


def laurent_u_strategy(field: Field, max_terms: int = 3):
    """Laurent polynomials in u with monomial w-coefficients."""

    @st.composite
    def build(draw):
        n = draw(st.integers(0, max_terms))
        terms = {}
        for _ in range(n):
            k = draw(st.integers(-4, 4))
            c = draw(st.integers(1, 4))
            e = draw(st.integers(-3, 3))
            terms[k] = RationalFunc.monomial(c, e, field)
        return RationalU.from_terms(terms, field)

    return build()


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.summary_lines():
        terminalreporter.write_line(line)
