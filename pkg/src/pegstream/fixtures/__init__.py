"""Bundled grammars and sample inputs used by tests, docs, and demos."""

from importlib import resources


def read_text(name):
    return resources.files(__name__).joinpath(name).read_text(encoding="utf-8")


def read_bytes(name):
    return resources.files(__name__).joinpath(name).read_bytes()


def path(name):
    return resources.files(__name__).joinpath(name)
