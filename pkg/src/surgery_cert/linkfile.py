"""Link descriptions: YAML/JSON documents and built-in presets.

A document either names a preset::

    preset: chain:4
    signs: [-1, -1, -1, -1]     # optional, adjacent linking numbers

or spells out the linking matrix (nested rows or a flat row-major list)::

    n: 2
    linking: [[0, 1], [1, 0]]
"""

from __future__ import annotations

from pathlib import Path
from typing import Optional, Sequence

import yaml

from .homology import LinkingMatrix, chain_link, hopf_link


class LinkFormatError(ValueError):
    pass


def preset(name: str, signs: Optional[Sequence[int]] = None) -> LinkingMatrix:
    name = name.strip().lower()
    if name == "hopf":
        if signs:
            if len(signs) != 1:
                raise LinkFormatError("hopf takes a single linking sign")
            return hopf_link(int(signs[0]))
        return hopf_link(1)
    if name.startswith("chain:"):
        try:
            n = int(name.split(":", 1)[1])
        except ValueError as exc:
            raise LinkFormatError(f"bad preset {name!r}") from exc
        try:
            return chain_link(n, signs)
        except ValueError as exc:
            raise LinkFormatError(str(exc)) from exc
    raise LinkFormatError(f"unknown preset {name!r} (known: hopf, chain:<n>)")


def parse_link(text: str) -> LinkingMatrix:
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise LinkFormatError(f"not a YAML/JSON document: {exc}") from exc
    if not isinstance(doc, dict):
        raise LinkFormatError("link description must be a mapping")
    if "preset" in doc:
        return preset(str(doc["preset"]), doc.get("signs"))
    if "linking" not in doc:
        raise LinkFormatError("link description needs 'linking' or 'preset'")
    rows = doc["linking"]
    n = doc.get("n")
    if rows and all(isinstance(v, int) for v in rows):
        if n is None:
            raise LinkFormatError("a flat linking list needs 'n'")
        if len(rows) != n * n:
            raise LinkFormatError(f"expected {n * n} entries, got {len(rows)}")
        rows = [rows[i * n:(i + 1) * n] for i in range(n)]
    if n is not None and len(rows) != n:
        raise LinkFormatError(f"n = {n} but the matrix has {len(rows)} rows")
    try:
        return LinkingMatrix.from_rows(rows)
    except (TypeError, ValueError) as exc:
        raise LinkFormatError(str(exc)) from exc


def load_link(path) -> LinkingMatrix:
    return parse_link(Path(path).read_text())


def dump_link(L: LinkingMatrix) -> str:
    return yaml.safe_dump({"n": L.n, "linking": [list(r) for r in L.entries]},
                          default_flow_style=None, sort_keys=True)
