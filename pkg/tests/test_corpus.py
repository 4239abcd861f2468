import json
import shlex
from pathlib import Path

import pytest

from abel_lab.cli import main

_corpus_dir = Path(__file__).parent / 'corpus'


def get_test_cases() -> list[str]:
    """Get all test cases from tests/corpus directory.

    A case directory holds ``cmd.txt`` (one ``abel-lab`` argument line) and either
    ``expected.json`` (a subset of the JSON output) or ``expected.err`` (the start of
    the stderr report of a domain error). Prefix a case with ``x.`` to run it alone.

    Returns:
    list[str]: Names of all test case directories in the corpus
    """
    result = [d.name for d in _corpus_dir.iterdir() if d.is_dir() and not d.name.startswith('.')]
    exclusive = [d for d in result if d.casefold().startswith('x.')]
    return sorted(exclusive or result)


def assert_subset(expected, actual, where: str = '$'):
    match expected:
        case dict():
            assert isinstance(actual, dict), f"{where}: expected an object, got {actual!r}"
            for key, value in expected.items():
                assert key in actual, f"{where}: missing key '{key}'"
                assert_subset(value, actual[key], f"{where}.{key}")
        case list() if any(isinstance(item, dict) for item in expected):
            assert isinstance(actual, list) and len(actual) == len(expected), f"{where}: {actual!r}"
            for i, (x, y) in enumerate(zip(expected, actual)):
                assert_subset(x, y, f"{where}[{i}]")
        case float():
            assert actual == pytest.approx(expected), f"{where}: {actual!r} != {expected!r}"
        case _:
            assert actual == expected, f"{where}: {actual!r} != {expected!r}"


@pytest.mark.parametrize('test_case', get_test_cases())
def test_corpus(test_case: str, capsys):
    """Run the command line of each corpus case and compare its output."""
    test_dir = _corpus_dir / test_case
    argv = shlex.split((test_dir / 'cmd.txt').read_text())
    assert argv, "Empty cmd.txt"

    expected_err = test_dir / 'expected.err'
    if expected_err.exists():
        assert main(argv) == 1
        assert capsys.readouterr().err.startswith(expected_err.read_text().strip())
        return

    assert main(argv) == 0
    actual = json.loads(capsys.readouterr().out)
    expected = json.loads((test_dir / 'expected.json').read_text())
    assert_subset(expected, actual)
