"""Bundled example codes and signature specs."""

from __future__ import annotations

import os
from functools import lru_cache

from .encoder import GroupSystem, analyze
from .synthesis import LevelSpec, load_level_spec
from .system import BlockCode, load_block_code

DATA_DIR = os.path.join(os.path.dirname(__file__), "data")

CODES = ("trivial", "z2pair", "z2rate1", "s3pair", "s3chain", "h8")
SPECS = ("trivial", "z2seq", "z2group", "z2full", "block2", "h8")

# the extended Hamming generators in the textbook form: one of span 4 and
# three of span 2 (V4 labels 0=00 1=01 2=10 3=11)
H8_PREFERRED = ((2, 2, 2, 2), (3, 3, 0, 0), (0, 3, 3, 0), (0, 0, 3, 3))


def code_path(name: str) -> str:
    return os.path.join(DATA_DIR, f"{name}.code")


def spec_path(name: str) -> str:
    return os.path.join(DATA_DIR, f"sig_{name}.sig")


def load_code(name: str) -> BlockCode:
    return load_block_code(code_path(name))


def load_spec(name: str) -> LevelSpec:
    return load_level_spec(spec_path(name))


def preferred(name: str) -> tuple:
    return H8_PREFERRED if name == "h8" else ()


@lru_cache(maxsize=None)
def system(name: str) -> GroupSystem:
    """Analyzed fixture, cached; H8 uses its textbook generators."""
    return analyze(load_code(name), prefer=preferred(name))


def h8() -> BlockCode:
    return load_code("h8")
