"""JSON descriptors for groups, sets, and maps, shared by the CLI and tests."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Union

from .gensets import build_set
from .groups import CyclicProductGroup, Group, make_group
from .sets import GSet, SetError


class DescriptorError(ValueError):
    """Malformed JSON or an unusable descriptor; carries location info."""


def loads(text: str, source: str = "<string>") -> object:
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise DescriptorError(f"{source}: line {e.lineno} column {e.colno}: {e.msg}") from e


def load_json(path: Union[str, Path]) -> object:
    p = Path(path)
    return loads(p.read_text(), source=str(p))


def set_to_dict(A: GSet, coords: bool = False) -> dict:
    if coords:
        grp = A.group
        if not isinstance(grp, CyclicProductGroup):
            raise SetError("coordinate form needs a cyclic-product group")
        mat = grp.coords_matrix()[A.indices]
        return {"group": grp.describe(), "elements_coords": [row.tolist() for row in mat]}
    return A.to_dict()


def set_from_dict(data: dict) -> GSet:
    if not isinstance(data, dict):
        raise DescriptorError(f"set descriptor must be an object, got {type(data).__name__}")
    if "group" not in data:
        raise DescriptorError('set descriptor needs a "group" entry')
    grp = make_group(data["group"])
    if "elements" in data:
        return GSet.from_indices(grp, data["elements"])
    if "elements_coords" in data:
        return GSet.from_coords(grp, data["elements_coords"])
    if "generator" in data:
        return build_set(grp, data["generator"])
    raise DescriptorError('set descriptor needs "elements", "elements_coords", or "generator"')


def load_set(path: Union[str, Path]) -> GSet:
    return set_from_dict(load_json(path))


def group_from_dict(data: dict) -> Group:
    return make_group(data)


def load_group(path: Union[str, Path]) -> Group:
    data = load_json(path)
    if isinstance(data, dict) and "group" in data and "kind" not in data:
        data = data["group"]
    return make_group(data)
