import pytest

from cswl.experiments import load_designs
from cswl.pipeline import Dataset, build_representations, default_object_names

CODEBOOK_SEED = 0


@pytest.fixture(scope="session")
def designs():
    return load_designs()


@pytest.fixture(scope="session")
def default_reps(designs):
    names = default_object_names(designs.values())
    return build_representations(Dataset.synthetic(names, seed=CODEBOOK_SEED), seed=CODEBOOK_SEED)


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def acceptance_log():
    return ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
