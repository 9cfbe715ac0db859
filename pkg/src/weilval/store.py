"""Line-delimited JSON store for resumable scans.

Layout of a store file::

    {"kind": "header", "version": 1, "command": ..., "config": {...}, "config_hash": ...}
    {"kind": "record", ...}            # zero or more per work unit
    {"kind": "unit_end", "key": [...], "records": k}
    ...
    {"kind": "summary", ...}

A unit is complete only once its ``unit_end`` line is on disk.  Resuming
drops everything after the last complete unit and carries on from there, so
an interrupted run and an uninterrupted one end byte-identical.
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import asdict, dataclass, fields

STORE_VERSION = 1


class CorruptStore(ValueError):
    pass


def dumps(obj) -> str:
    return json.dumps(obj, separators=(",", ":"), ensure_ascii=True)


def config_hash(config: dict) -> str:
    """Git blob hash of the canonical config text."""
    body = json.dumps(config, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha1(b"blob %d\0" % len(body) + body).hexdigest()


@dataclass(frozen=True)
class ScanRecord:
    p: int
    n: int
    d_canonical: int
    m: int
    den: int
    degenerate_levels: tuple[int, ...]
    case_label: str
    bound_num: int
    bound_den: int
    ok: bool
    tight: bool

    def to_dict(self) -> dict:
        out = {"kind": "record"}
        out.update(asdict(self))
        out["degenerate_levels"] = list(self.degenerate_levels)
        return out

    def to_json(self) -> str:
        return dumps(self.to_dict())

    @classmethod
    def from_dict(cls, obj: dict) -> "ScanRecord":
        names = [f.name for f in fields(cls)]
        missing = [k for k in names if k not in obj]
        if missing:
            raise CorruptStore(f"record lacks {missing}")
        vals = {k: obj[k] for k in names}
        vals["degenerate_levels"] = tuple(vals["degenerate_levels"])
        return cls(**vals)

    @classmethod
    def from_json(cls, line: str) -> "ScanRecord":
        return cls.from_dict(json.loads(line))

    @property
    def key(self) -> tuple[int, int, int]:
        return self.p, self.n, self.d_canonical


def _parse(path: str):
    with open(path, "rb") as fh:
        data = fh.read()
    lines = data.split(b"\n")
    # a trailing piece without newline is an interrupted write
    complete, tail = lines[:-1], lines[-1]
    parsed = []
    offset = 0
    for raw in complete:
        offset += len(raw) + 1
        try:
            parsed.append((offset, json.loads(raw)))
        except ValueError:
            parsed.append((offset, None))
    return parsed, bool(tail)


def read_store(path: str):
    """Return ``(header, units, summary)``; units map key tuples to record dicts."""
    parsed, _ = _parse(path)
    if not parsed or parsed[0][1] is None or parsed[0][1].get("kind") != "header":
        raise CorruptStore(f"{path}: missing header")
    header = parsed[0][1]
    units = {}
    pending = []
    summary = None
    for _, obj in parsed[1:]:
        if obj is None:
            raise CorruptStore(f"{path}: unreadable line")
        kind = obj.get("kind")
        if kind == "record":
            pending.append(obj)
        elif kind == "unit_end":
            units[tuple(obj["key"])] = pending
            pending = []
        elif kind == "summary":
            summary = obj
    return header, units, summary


class ScanStore:
    """Single-writer append-only store; call :meth:`open` then :meth:`write_unit`."""

    def __init__(self, path: str, command: str, config: dict):
        self.path = path
        self.command = command
        self.config = config
        self.done: dict[tuple, list] = {}
        self._fh = None

    def header(self) -> dict:
        return {"kind": "header", "version": STORE_VERSION, "command": self.command,
                "config": self.config, "config_hash": config_hash(self.config)}

    def open(self, resume: bool = False) -> None:
        if resume and os.path.exists(self.path):
            self._resume()
            return
        self._fh = open(self.path, "w", encoding="ascii", newline="\n")
        self._fh.write(dumps(self.header()) + "\n")
        self._fh.flush()

    def _resume(self) -> None:
        hint = f"delete {self.path} or rerun with --out to start over"
        parsed, _ = _parse(self.path)
        if not parsed or parsed[0][1] is None or parsed[0][1].get("kind") != "header":
            raise CorruptStore(f"{self.path}: header unreadable; {hint}")
        head = parsed[0][1]
        if head.get("version") != STORE_VERSION or head.get("command") != self.command:
            raise CorruptStore(f"{self.path}: written by a different command/version; {hint}")
        if head.get("config_hash") != config_hash(self.config):
            raise CorruptStore(f"{self.path}: configuration differs from this run; {hint}")
        keep = parsed[0][0]
        pending = []
        for i, (end, obj) in enumerate(parsed[1:], start=1):
            if obj is None:
                # only the final line may be damaged
                if i != len(parsed) - 1:
                    raise CorruptStore(f"{self.path}: damaged line {i + 1}; {hint}")
                break
            kind = obj.get("kind")
            if kind == "record":
                pending.append(obj)
            elif kind == "unit_end":
                if len(pending) != obj.get("records"):
                    raise CorruptStore(f"{self.path}: unit {obj.get('key')} is short; {hint}")
                self.done[tuple(obj["key"])] = pending
                pending = []
                keep = end
            elif kind == "summary":
                break
            else:
                raise CorruptStore(f"{self.path}: unknown line kind {kind!r}; {hint}")
        with open(self.path, "r+b") as fh:
            fh.truncate(keep)
        self._fh = open(self.path, "a", encoding="ascii", newline="\n")

    def write_unit(self, key: tuple, records: list[dict]) -> None:
        for rec in records:
            self._fh.write(dumps(rec) + "\n")
        self._fh.write(dumps({"kind": "unit_end", "key": list(key), "records": len(records)})
                       + "\n")
        self._fh.flush()
        self.done[tuple(key)] = records

    def finish(self, summary: dict) -> None:
        self._fh.write(dumps({"kind": "summary", **summary}) + "\n")
        self._fh.close()
        self._fh = None

    def close(self) -> None:
        if self._fh is not None:
            self._fh.close()
            self._fh = None
