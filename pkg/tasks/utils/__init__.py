from .text import (
    SIGNIFICANT_DIGITS,
    format_exact,
    format_significant,
    get_checksum,
)
