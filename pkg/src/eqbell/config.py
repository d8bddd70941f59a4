"""Resource caps shared by every module.

Caps are hard limits: exceeding one raises :class:`ResourceError` naming the
cap and the offending size. They can be overridden from an INI file with a
``[caps]`` section (``max_vertices = ...``) or programmatically.
"""
from __future__ import annotations

import configparser
import os
from contextlib import contextmanager
from dataclasses import dataclass, fields


class ResourceError(RuntimeError):
    def __init__(self, cap: str, size, limit):
        super().__init__(f"resource cap caps.{cap} exceeded: size {size} > limit {limit}")
        self.cap = cap
        self.size = size
        self.limit = limit


@dataclass
class Caps:
    max_partitions: int = 200_000
    max_strategies: int = 5_000_000
    max_vertices: int = 200_000
    max_dd_rays: int = 2_000_000
    # cumulative candidate pairs tested by double description
    max_dd_work: int = 5_000_000_000
    max_lp_variables: int = 20_000
    max_hilbert_dim: int = 256
    max_group_size: int = 500_000

    def update(self, **kwargs):
        names = {f.name for f in fields(self)}
        for key, value in kwargs.items():
            key = key.removeprefix("caps.")
            if key not in names:
                raise KeyError(f"unknown cap {key!r}")
            setattr(self, key, int(value))

    def check(self, name: str, size: int):
        limit = getattr(self, name)
        if size > limit:
            raise ResourceError(name, size, limit)


caps = Caps()


def load_caps_file(path):
    parser = configparser.ConfigParser()
    with open(path, encoding="utf-8") as fh:
        parser.read_file(fh)
    if parser.has_section("caps"):
        caps.update(**dict(parser.items("caps")))
    return caps


@contextmanager
def override_caps(**kwargs):
    saved = {f.name: getattr(caps, f.name) for f in fields(caps)}
    caps.update(**kwargs)
    try:
        yield caps
    finally:
        caps.update(**saved)


if os.environ.get("EQBELL_CAPS"):
    load_caps_file(os.environ["EQBELL_CAPS"])
