import pytest

from helpers import worked_example
from transopt import TransportPlan


@pytest.fixture
def worked_instance():
    return worked_example()


@pytest.fixture
def worked_plan():
    # the optimal shipment of the worked example: x_13=3, x_21=3, x_24=2,
    # x_32=2, x_33=3, x_34=2 in 1-based notation
    return TransportPlan(
        {(0, 2): 3, (1, 0): 3, (1, 3): 2, (2, 1): 2, (2, 2): 3, (2, 3): 2}
    )
