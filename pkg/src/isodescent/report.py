"""Run configuration and the machine-readable report envelope."""
from __future__ import annotations

import csv
import hashlib
import io
import json
from dataclasses import dataclass, field, fields
from pathlib import Path

from . import __version__
from .errors import InvalidInput
from .localfield import DEFAULT_DEPTH_CAP, MAX_DEPTH_CAP

SCHEMA_VERSION = "1"
OUTPUTS = ("json", "csv", "text")


@dataclass
class RunConfig:
    depth_cap: int = DEFAULT_DEPTH_CAP
    max_depth_cap: int = MAX_DEPTH_CAP
    search_bound: int = 10**6
    ranks: dict = field(default_factory=dict)
    assume_finiteness: bool = False
    output: str = "json"
    parallelism: int = 1
    certificates: bool = True
    strict_hcf: bool = False

    def __post_init__(self):
        for name in ("depth_cap", "max_depth_cap", "search_bound", "parallelism"):
            if int(getattr(self, name)) < 1:
                raise InvalidInput(f"{name} must be positive")
        if self.output not in OUTPUTS:
            raise InvalidInput(f"output must be one of {OUTPUTS}")
        for tag, r in self.ranks.items():
            if not isinstance(r, int) or r < 0:
                raise InvalidInput(f"rank for {tag!r} must be a nonnegative integer")

    @classmethod
    def from_mapping(cls, data: dict) -> RunConfig:
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise InvalidInput(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)

    @classmethod
    def load(cls, path: str | Path) -> RunConfig:
        try:
            data = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise InvalidInput(f"cannot read config {path}: {exc}") from exc
        if not isinstance(data, dict):
            raise InvalidInput("config must be a JSON object")
        return cls.from_mapping(data)


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def build_report(command: str, inputs: dict, results, certificates=None, conditional_on=(), notes=(), include_certs=True) -> dict:
    """Assemble a report; the hash covers every field except itself."""
    report = {
        "schema_version": SCHEMA_VERSION,
        "version": __version__,
        "command": command,
        "inputs": inputs,
        "results": results,
        "assumptions": {"conditional_on": sorted(set(conditional_on)), "notes": list(notes)},
    }
    if include_certs and certificates is not None:
        report["certificates"] = certificates
    else:
        report["certificates_elided"] = certificates is not None
    report["deterministic_hash"] = hashlib.sha256(canonical_json(report).encode()).hexdigest()
    return report


def verify_hash(report: dict) -> bool:
    body = {k: v for k, v in report.items() if k != "deterministic_hash"}
    return hashlib.sha256(canonical_json(body).encode()).hexdigest() == report.get("deterministic_hash")


def to_csv(columns: list[str], rows: list[dict]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n", extrasaction="ignore")
    w.writeheader()
    for row in rows:
        w.writerow(row)
    return buf.getvalue()
