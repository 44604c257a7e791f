import pytest

from deadline_sched import LinkParams, ProblemInstance, _kernels_py, validate_arrivals

try:
    from deadline_sched import _kernels_c
except ImportError:
    _kernels_c = None

BACKENDS = [pytest.param(_kernels_py, id="python")]
if _kernels_c is not None:
    BACKENDS.append(pytest.param(_kernels_c, id="cython"))

UNIT = LinkParams(1.0, 1.0, 1.0)


def unit_instance(P, T=1.0, bits=1.0):
    return ProblemInstance(P, T, LinkParams(bits, 1.0, 1.0))


def seq(gaps, T=1.0, bits=1.0):
    inst = unit_instance(len(gaps), T, bits)
    return inst, validate_arrivals(gaps, inst)


@pytest.fixture(params=BACKENDS)
def kernels(request, monkeypatch):
    """Run the test once per available kernel backend."""
    from deadline_sched import _backend

    monkeypatch.setattr(_backend, "kernels", request.param)
    return request.param
