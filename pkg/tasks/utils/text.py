import hashlib
import math
from io import BytesIO

SIGNIFICANT_DIGITS = 6


def get_checksum(source_text: str) -> str:
    """Calculate the md5 checksum of text
    by creating a file-like object without reading its
    whole content in memory.

    Example
    -------
    >>> get_checksum("A simple text")
        'ef313f200597d0a1749533ba6aeb002e'
    """
    file = BytesIO(source_text.encode(encoding="UTF-8"))

    m = hashlib.md5()
    while True:
        d = file.read(8096)
        if not d:
            break
        m.update(d)
    return m.hexdigest()


def format_significant(value: float) -> str:
    """
    Print a number with six significant digits, the precision of every CSV
    table written by the tasks

    Example
    -------
    >>> format_significant(5012.3456)
        '5012.35'
    """
    if value is None or (isinstance(value, float) and math.isnan(value)):
        return ""
    return f"{value:.{SIGNIFICANT_DIGITS}g}"


def format_exact(value: float) -> str:
    """
    Print a number with as many digits as it takes to read the same float
    back, for tables that other commands load again

    Example
    -------
    >>> format_exact(1234560.5)
        '1234560.5'
    """
    if value is None or (isinstance(value, float) and math.isnan(value)):
        return ""
    return repr(float(value))
