from __future__ import annotations

from decimal import ROUND_HALF_UP, Decimal


def round2(x: float) -> float:
    return float(Decimal(repr(x)).quantize(Decimal("0.01"), rounding=ROUND_HALF_UP))


def percent(count: int, total: int) -> int | None:
    """Integer percentage rounded half-up; None when the total is zero."""
    if not total:
        return None
    return int((Decimal(100 * count) / Decimal(total)).quantize(Decimal(1), rounding=ROUND_HALF_UP))
