import pytest

from monodromy_kit.number_kit import format_complex, parse_complex


@pytest.mark.parametrize('z, text', [
    (2 + 1e-17j, '2+0i'),
    (-4j, '0-4i'),
    (0.3 + 0.4j, '0.3+0.4i'),
    (-0.0 + 0j, '0+0i'),
    (3 ** 0.5, '1.73205080757+0i'),
])
def test_format(z, text):
    assert format_complex(z) == text


@pytest.mark.parametrize('text, z', [
    ('2+i', 2 + 1j),
    ('-4i', -4j),
    ('1.5-2.5i', 1.5 - 2.5j),
    ('3', 3),
    ('1e-3+2j', 0.001 + 2j),
    ('i', 1j),
])
def test_parse(text, z):
    assert parse_complex(text) == z


def test_parse_passes_numbers_and_pairs():
    assert parse_complex(2) == 2
    assert parse_complex([1, -2]) == 1 - 2j


@pytest.mark.parametrize('text', ['', 'abc', '1+2k'])
def test_parse_rejects(text):
    with pytest.raises(ValueError):
        parse_complex(text)


def test_round_trip():
    for z in (1 / 3 + 2j / 7, -1e5 + 1e-3j, 4j):
        assert parse_complex(format_complex(z)) == pytest.approx(z, rel=1e-11)
