import pytest

from evlab import maass


@pytest.fixture(scope="session")
def even_form():
    return maass.load_maass_form(maass.shipped_form_path("even"))


@pytest.fixture(scope="session")
def odd_form():
    return maass.load_maass_form(maass.shipped_form_path("odd"))
