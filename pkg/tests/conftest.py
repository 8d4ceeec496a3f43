import pytest

from voiceshop import paths
from voiceshop.command import load_grammar
from voiceshop.provider import load_script
from voiceshop.shop import load_catalog


@pytest.fixture(scope="session")
def grammar():
    return load_grammar(paths.default_grammar_path())


@pytest.fixture(scope="session")
def catalog():
    return load_catalog(paths.default_catalog_path())


@pytest.fixture(scope="session")
def golden_script():
    return load_script(paths.golden_script_path())
