"""JSON schemas of the machine-readable reports."""
import json
import os

from typing import Any, Dict

_SCHEMA_DIR = os.path.dirname(os.path.abspath(__file__))

SCHEMA_NAMES = ("check_report", "inference_result", "search_evidence")


def load_schema(name: str) -> Dict[str, Any]:
    if name not in SCHEMA_NAMES:
        raise ValueError(f"Unknown schema {name!r}. Use one of {list(SCHEMA_NAMES)}.")
    with open(os.path.join(_SCHEMA_DIR, f"{name}.schema.json"), encoding="utf-8") as f:
        return json.load(f)
