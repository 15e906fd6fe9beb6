"""Bundled diagrams, urns and reference labellings."""

from __future__ import annotations

from importlib import resources

from .diagram import OrthoDiagram, parse_diagram

DIAGRAMS = (
    "l12",
    "pentagon",
    "triangle",
    "square",
    "combo",
    "pentagon_inner1",
    "pentagon_inner3",
    "pentagon_fig2f",
    "single_context_3",
)


def path(name: str):
    """Filesystem path of a bundled data file."""
    return resources.files(__package__).joinpath("data", name)


def read(name: str) -> str:
    return path(name).read_text(encoding="utf-8")


def load(name: str) -> OrthoDiagram:
    """Parse a bundled diagram by stem, e.g. ``load("pentagon")``."""
    return parse_diagram(read(name if name.endswith(".gd") else name + ".gd"))
