"""Locations of the data files shipped inside the package."""

from __future__ import annotations

from importlib import resources
from pathlib import Path


def _data(*parts: str) -> Path:
    node = resources.files("voiceshop").joinpath("data")
    for part in parts:
        node = node.joinpath(part)
    return Path(str(node))


def default_catalog_path() -> Path:
    return _data("catalog.json")


def default_grammar_path() -> Path:
    return _data("grammar.json")


def golden_script_path() -> Path:
    return _data("golden_purchase.jsonl")


def eval_sample_path(name: str) -> Path:
    return _data("eval_sample", name)
