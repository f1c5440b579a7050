"""Bundled example scenarios and flow documents."""

from importlib import resources

BUNDLED = ("fig1", "fig2", "fig1_flow", "fig2_flow")


def bundled_text(name: str) -> str:
    """Return the JSON text of a bundled document, e.g. ``fig1`` or ``fig1_flow``."""
    if name not in BUNDLED:
        raise KeyError(f"no bundled document '{name}'; available: {', '.join(BUNDLED)}")
    return resources.files(__package__).joinpath(f"{name}.json").read_text(encoding="utf-8")
