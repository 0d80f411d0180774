"""Canonical JSON used for every on-disk artifact.

All documents (mapping store, lexicon, behavior scripts, models, reports,
label files) are UTF-8 JSON written with sorted keys, two-space indentation,
``ensure_ascii=False`` and a trailing newline.  Floats are written with
Python's shortest round-trip ``repr`` so a load/dump cycle is bit-exact.
"""

import json
from pathlib import Path


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False, allow_nan=False) + "\n"


def dump(obj, path) -> None:
    Path(path).write_text(dumps(obj), encoding="utf-8")


def _reject_duplicates(pairs):
    out = {}
    for key, value in pairs:
        if key in out:
            raise _DuplicateJsonKey(key)
        out[key] = value
    return out


class _DuplicateJsonKey(ValueError):
    def __init__(self, key):
        super().__init__(key)
        self.key = key


def loads_strict(text: str):
    """Parse JSON, raising ``_DuplicateJsonKey`` on repeated object keys."""
    return json.loads(text, object_pairs_hook=_reject_duplicates)


def load(path):
    return json.loads(Path(path).read_text(encoding="utf-8"))
