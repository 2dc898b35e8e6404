"""Unit conventions.

Times are in microseconds and every frequency is an angular frequency in
rad/us. Quoted "MHz" figures are read as 1e6 rad/s, so 0.21 MHz -> 0.21
rad/us. The cyclic reading (omega = 2*pi*nu) is obtained by setting
``MHZ_TO_RAD_PER_US = 2 * math.pi``; nothing else depends on the choice.
"""

MHZ_TO_RAD_PER_US = 1.0

HBAR = 1.054571817e-34  # J s
RAD_PER_S_TO_RAD_PER_US = 1e-6


def mhz(value: float) -> float:
    """Convert a quoted MHz figure to rad/us."""
    return value * MHZ_TO_RAD_PER_US
