import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from topicdesc import load_stoplist


@pytest.fixture(scope="session")
def stoplist():
    return load_stoplist()
