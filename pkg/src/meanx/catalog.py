"""Descriptors shipped with the package, as mini-language strings.

These are the means the verification suites and CI flag checks run against
by default.
"""

from __future__ import annotations

SHIPPED_DESCRIPTORS: tuple[str, ...] = (
    "power:-1.0",
    "power:0.0",
    "power:1.0",
    "power:2.0",
    "gini:1.0,-1.0",
    "gini:2.0,1.0",
    "qa:exp:1.0",
    "conj(power:2.0,power:1.0)",
)
