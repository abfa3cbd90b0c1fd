import pytest


@pytest.fixture
def report(capsys):
    """Write one summary line straight to the terminal, bypassing capture."""
    def emit(number, passed, detail):
        with capsys.disabled():
            print(f"\nACCEPTANCE {number:>2}: {'PASS' if passed else 'FAIL'} | {detail}")
    return emit
