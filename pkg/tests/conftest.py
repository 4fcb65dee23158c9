"""Shared fixtures: the default paraffin configuration and helpers for
building modified copies by textual substitution (the same mechanism the
sweep verb uses, so tests exercise the production path)."""

import pytest

from stefanetc import config


@pytest.fixture(scope="session")
def default_cfg():
    return config.default_config()


@pytest.fixture(scope="session")
def default_text():
    return config.default_config_text()


def variant_text(text: str, replacements) -> str:
    """Apply exact textual substitutions, failing loudly on a stale pattern."""
    for old, new in replacements:
        assert old in text, f"pattern {old!r} not found in config text"
        text = text.replace(old, new)
    return text


@pytest.fixture(scope="session")
def make_variant(default_text):
    def build(*replacements):
        return config.parse_config_text(variant_text(default_text, replacements))
    return build
