"""Fixed-width big-endian bit strings for control fields and coded transfer."""

from typing import List, Sequence


def bit_width(max_value: int) -> int:
    """Bits needed to write every value in [0, max_value]."""
    return max(1, int(max_value).bit_length())


def lg(x: int) -> int:
    """The ceiling of log2(x + 1), for x >= 0."""
    if x < 0:
        raise ValueError(f"lg is defined for non-negative values, got {x}")
    return int(x).bit_length()


def ceil_log2(x: int) -> int:
    if x < 1:
        raise ValueError(f"ceil_log2 needs a positive argument, got {x}")
    return (int(x) - 1).bit_length()


def encode_uint(value: int, width: int) -> str:
    if value < 0:
        raise ValueError(f"cannot encode negative value {value}")
    if value >= 1 << width:
        raise ValueError(f"value {value} does not fit in {width} bits")
    return format(value, f"0{width}b")


def encode_uints(values: Sequence[int], width: int) -> str:
    return "".join(encode_uint(value, width) for value in values)


def decode_uints(bits: str, width: int) -> List[int]:
    if width < 1 or len(bits) % width:
        raise ValueError(f"{len(bits)} bits cannot be split into fields of {width}")
    return [int(bits[start:start + width], 2) for start in range(0, len(bits), width)]


def decode_uint(bits: str) -> int:
    return int(bits, 2) if bits else 0
