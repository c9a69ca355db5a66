from typing import List, Tuple

from config.settings import SIGNIFICANT_DIGITS

# Anything smaller is numerical noise for O(1) normalized quantities
CHOP = 1e-14


def round_sig(x: float, digits: int = SIGNIFICANT_DIGITS) -> float:
    x = float(x)
    if abs(x) < CHOP:
        return 0.0
    return float(f"{x:.{digits}g}")


def fmt(x: float, digits: int = SIGNIFICANT_DIGITS) -> str:
    return f"{round_sig(x, digits):.{digits}g}"


def complex_pair(z: complex) -> Tuple[float, float]:
    z = complex(z)
    return round_sig(z.real), round_sig(z.imag)


def fmt_complex(z: complex) -> str:
    re, im = complex_pair(z)
    if im == 0.0:
        return fmt(re)
    sign = "+" if im > 0 else "-"
    return f"{fmt(re)}{sign}{fmt(abs(im))}j"


def matrix_pairs(matrix) -> List[List[Tuple[float, float]]]:
    return [[complex_pair(z) for z in row] for row in matrix]
