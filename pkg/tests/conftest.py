import random
import time

import pytest

SESSION_START = time.time()


@pytest.fixture
def rng():
    return random.Random(0xC0FFEE)
