import pytest


def pytest_addoption(parser):
    parser.addoption(
        "--fast-acceptance", action="store_true", default=False,
        help="shrink the acceptance grids/horizons for a quick smoke run")


@pytest.fixture(scope="session")
def fast_acceptance(request):
    return request.config.getoption("--fast-acceptance")
