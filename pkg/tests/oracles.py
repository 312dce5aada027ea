"""Independent reference values and simulators for the test-suite.

Everything here is either a hand-derived constant (frozen before the engine
was run) or a brute-force computation that shares no code with the package.
"""
from __future__ import annotations

from fractions import Fraction as F

# h -> (M1, m1, M2, m2), by direct substitution into the threshold formulas
THRESHOLDS = {
    3: (F(8, 7), F(1), F(3, 2), F(3, 2)),
    5: (F(32, 31), F(1), F(3, 2), F(5, 4)),
    7: (F(128, 127), F(1), F(3, 2), F(9, 8)),
    9: (F(512, 511), F(1), F(3, 2), F(17, 16)),
    11: (F(2048, 2047), F(1), F(3, 2), F(33, 32)),
}

# number of leaves funded by the opening: sum of 2^(h-j) over odd j >= 3
OPENING_LEAVES = {3: 1, 5: 5, 7: 21, 9: 85}

# root mean of the opening placement
OPENING_ROOT_MASS = {3: F(1, 7), 5: F(5, 31), 7: F(21, 127)}

# h=3 opening: t on the funded path
OPENING_H3 = {"001": F(8, 7), "00": F(4, 7), "0": F(2, 7)}

# after the case A move at h=3
CASE_A_H3 = {"0": F(6, 7), "1": F(8, 7)}

# root mean after the case B move
CASE_B_ROOT_MEAN = {3: F(25, 28), 7: F(21, 127) + F(3, 4)}

# lower bounds for the root bettor along A_{h-1}..A_1 and the resulting cap at B_1
LOWER_BOUNDS = {
    3: ([F(1, 2), F(1, 2)], F(3, 2)),
    5: ([F(1, 2), F(1, 2), F(3, 4), F(3, 4)], F(5, 4)),
    7: ([F(1, 2), F(1, 2), F(3, 4), F(3, 4), F(7, 8), F(7, 8)], F(9, 8)),
}

# 16 symbols of the no-shortcut pattern, as printed
PATTERN_16 = "0100010101000100"

# decomposition worked example (depth 2)
DECOMP_T = {"": F(1), "0": F(3, 2), "1": F(1, 2), "00": F(2), "01": F(1), "10": F(1, 2), "11": F(1, 2)}
DECOMP_T0 = {"": F(1), "0": F(1), "1": F(1), "00": F(4, 3), "01": F(2, 3), "10": F(1), "11": F(1)}
DECOMP_T1 = {"": F(1), "0": F(3, 2), "1": F(1, 2), "00": F(3, 2), "01": F(3, 2), "10": F(1, 2), "11": F(1, 2)}

# composition
PASSIVE_GROWTH = {k: F(8, 7) ** k for k in range(1, 8)}
CASE_B_CHAIN = {"heights": [3, 5, 7], "growth": F(27, 8), "allowance": F(135, 64)}
CASE_B_SCALES_AFTER_2 = (F(9, 4), F(15, 8))

ALLOWANCE_GUARD = F(23843, 10000)


def allowance_product_bounds(terms: int = 40) -> tuple[F, F]:
    """Exact lower and upper bounds on prod_{k>=1} (1 + 2^-k).

    The tail after ``terms`` factors is at most exp(2^-terms) <= 1 + 2^(1-terms).
    """
    p = F(1)
    for k in range(1, terms + 1):
        p *= 1 + F(1, 2**k)
    return p, p * (1 + F(2, 2**terms))


# --------------------------------------------------------------------------
# alternating AND-OR tree evaluated left to right with short-circuiting


class _NeedLeaf(Exception):
    pass


_SHORT = object()


def _gate(level: int, bottom: str) -> str:
    other = "and" if bottom == "or" else "or"
    return bottom if level % 2 == 1 else other


def _eval(bits, level, start, bottom):
    if level == 0:
        if start >= len(bits):
            raise _NeedLeaf
        return bits[start]
    left = _eval(bits, level - 1, start, bottom)
    if left is _SHORT:
        return _SHORT
    g = _gate(level, bottom)
    if (g == "and" and left == 0) or (g == "or" and left == 1):
        return _SHORT  # right half would be skipped
    return _eval(bits, level - 1, start + 2 ** (level - 1), bottom)


def _alive(bits, height, bottom) -> bool:
    try:
        return _eval(bits, height, 0, bottom) is not _SHORT
    except _NeedLeaf:
        return True


def no_shortcut_labelings(height: int, bottom: str = "or") -> list[list[int]]:
    """All leaf labelings that force a left-to-right short-circuit evaluator
    of the alternating tree to read every leaf, found by depth-first search."""
    n = 2**height
    out: list[list[int]] = []
    stack: list[list[int]] = [[]]
    while stack:
        bits = stack.pop()
        if len(bits) == n:
            out.append(bits)
            continue
        for b in (1, 0):
            nxt = bits + [b]
            if _alive(nxt, height, bottom):
                stack.append(nxt)
    return sorted(out)


def and_or_sequence(n: int, height: int = 8) -> list[int]:
    """First ``n`` symbols common to every shortcut-free labeling."""
    labs = no_shortcut_labelings(height)
    assert labs, "no shortcut-free labeling"
    first = labs[0][:n]
    assert all(lab[:n] == first for lab in labs), "prefix not forced"
    return first


# --------------------------------------------------------------------------
# brute-force helpers


def all_leaves(h: int) -> list[str]:
    return [format(i, f"0{h}b") for i in range(2**h)]


def subtree_mean(leaf_values: dict[str, F], x: str, h: int) -> F:
    below = [v for leaf, v in leaf_values.items() if leaf.startswith(x)]
    return sum(below, F(0)) / 2 ** (h - len(x))
