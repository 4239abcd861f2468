import re

_TINY = 1e-12
_imaginary_suffix = re.compile(r'^(?P<body>.*?)\*?[iIjJ]$')


def format_complex(z: complex, digits: int = 12) -> str:
    """
    Render a complex number as ``re+imi`` with `digits` significant digits.

    Components below 1e-12 of the number's magnitude are printed as 0, so values
    that are real or imaginary up to round-off print cleanly.

    Example:
        >>> format_complex(2 + 1e-17j)
        '2+0i'
        >>> format_complex(-4j)
        '0-4i'
    """
    z = complex(z)
    eps = _TINY * max(1.0, abs(z))
    re_part = 0.0 if abs(z.real) <= eps else z.real
    im_part = 0.0 if abs(z.imag) <= eps else z.imag
    return f"{re_part:.{digits}g}{im_part:+.{digits}g}i"


def parse_complex(text: str | int | float | complex) -> complex:
    """
    Parse ``re+imi`` text (also accepts ``j`` and a bare ``i``) into a complex.

    Example:
        >>> parse_complex("2+i")
        (2+1j)
        >>> parse_complex("-4i")
        (-0-4j)
    """
    match text:
        case complex() | float() | int():
            return complex(text)
        case [re_part, im_part]:
            return complex(float(re_part), float(im_part))
    s = str(text).strip().replace(" ", "")
    if not s:
        raise ValueError("Empty complex literal")
    match _imaginary_suffix.match(s):
        case None:
            pass
        case found:
            body = found.group('body')
            if body in ("", "+", "-") or body[-1] in "+-":
                body += "1"
            s = body + "j"
    try:
        return complex(s)
    except ValueError:
        raise ValueError(f"Invalid complex literal: '{text}'") from None
