"""Shared, memoized construction of the built-in codes and their noisy recovery maps."""
from __future__ import annotations

import functools

from logicalnm.channels import bitflip_confusion, noisy_recovery_map
from logicalnm.code import builtin_five_qubit, builtin_rep3

CODES = {"rep3": builtin_rep3, "five-qubit": builtin_five_qubit}


@functools.lru_cache(maxsize=None)
def cached_code(name: str):
    return CODES[name]()


@functools.lru_cache(maxsize=None)
def cached_noisy(name: str, p: float):
    code = cached_code(name)
    return noisy_recovery_map(code, bitflip_confusion(code, p))

ACCEPTANCE_LINES: list[str] = []
