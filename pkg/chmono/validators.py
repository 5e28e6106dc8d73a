"""
Module 'chmono.validators'

Validators for the channel-monotone configuration and reports.

Key Functions:

- **validate_seesaw_counts**: restarts >= 1 and max_rounds >= 1.
- **validate_copies**: the supported regularisation depths n in {1, 2}.
- **validate_finite**: reported bounds are finite numbers.
"""
import math

from tempered.exceptions import ValidationError

SUPPORTED_COPIES = (1, 2)
# d_in * d_out per copy above which the two-copy programs are refused
MAX_TWO_COPY_SIZE = 9


def validate_positive_count(value: int, field: str) -> int:
    if isinstance(value, bool) or int(value) != value or value < 1:
        raise ValidationError(f"must be a positive integer, got {value}", field)
    return int(value)


def validate_seesaw_counts(restarts: int, max_rounds: int) -> None:
    """
    Checks the seesaw iteration counts.

    Raises:
        ValidationError: If restarts or max_rounds is below 1.
    """
    validate_positive_count(restarts, "restarts")
    validate_positive_count(max_rounds, "max_rounds")


def validate_copies(n: int, dim_in: int, dim_out: int) -> int:
    """
    Checks the number of channel copies of a finite-n bound.

    Args:
        n (int): Number of copies.
        dim_in (int): Input dimension of one copy.
        dim_out (int): Output dimension of one copy.

    Returns:
        int: n.

    Raises:
        ValidationError: If n is not 1 or 2, or if n = 2 for a channel with
            d_in * d_out > 9.
    """
    if isinstance(n, bool) or n not in SUPPORTED_COPIES:
        raise ValidationError(f"copies must be one of {SUPPORTED_COPIES}, got {n}", "copies")
    if n == 2 and dim_in * dim_out > MAX_TWO_COPY_SIZE:
        raise ValidationError(f"two copies of a {dim_in}->{dim_out} channel exceed the "
                              f"supported size (d_in * d_out <= {MAX_TWO_COPY_SIZE})", "copies")
    return int(n)


def validate_finite(value: float, field: str) -> float:
    if not math.isfinite(value):
        raise ValidationError(f"bound is not finite: {value}", field)
    return float(value)
