import pytest

from kinmorph.analyzer import Analyzer, data_path
from kinmorph.morphotactics import load_inventory, slot_id_for_name


@pytest.fixture(scope="session")
def inventory():
    return load_inventory(data_path("inventory.tsv").read_text())


@pytest.fixture(scope="session")
def analyzer():
    return Analyzer()


def load_fixture_pairs():
    """(deep pairs, surface, gloss) rows from the shipped fixture list."""
    rows = []
    for raw in data_path("fixtures/deep_surface.tsv").read_text().splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        deep_text, surface, gloss = line.split("\t")
        deep = []
        for token in deep_text.split():
            if ":" in token:
                form, slot = token.split(":")
                deep.append((form, slot_id_for_name(slot)))
            else:
                deep.append(token)
        rows.append((deep, surface, gloss))
    return rows


@pytest.fixture(scope="session")
def fixture_pairs():
    return load_fixture_pairs()
