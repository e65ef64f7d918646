"""Shared plumbing: diagnostics collection, seeded RNG streams, CSV helpers."""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np


@dataclass
class Diagnostic:
    source: str
    entity_id: str
    issue: str


class DiagnosticLog:
    """Append-only collection of data-quality events, writable as JSON lines."""

    def __init__(self):
        self.records: list[Diagnostic] = []

    def add(self, source: str, entity_id: str, issue: str) -> None:
        self.records.append(Diagnostic(source, entity_id, issue))

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def matching(self, source: str | None = None, entity_id: str | None = None) -> list[Diagnostic]:
        out = []
        for rec in self.records:
            if source is not None and rec.source != source:
                continue
            if entity_id is not None and rec.entity_id != entity_id:
                continue
            out.append(rec)
        return out

    def write_jsonl(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            for rec in self.records:
                fh.write(json.dumps(
                    {"source": rec.source, "entity_id": rec.entity_id, "issue": rec.issue},
                    sort_keys=True))
                fh.write("\n")


def rng_stream(seed: int, *key: int) -> np.random.Generator:
    """PCG64 generator on a stream derived from (seed, *key).

    Streams with distinct keys are statistically independent and reproducible
    across platforms, so parallel jobs can each own one.
    """
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence((int(seed),) + tuple(int(k) for k in key))))


def write_csv(path: str | Path, header: list[str], rows) -> None:
    """Write rows of str/number cells; floats keep full round-trip precision."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_cell(v) for v in row])


def _cell(v):
    if isinstance(v, (np.floating, float)):
        return repr(float(v))
    if isinstance(v, (np.integer, int)):
        return str(int(v))
    if v is None:
        return ""
    return str(v)


def read_csv_rows(path: str | Path) -> tuple[list[str], list[list[str]]]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            return [], []
        return header, [row for row in reader if row]
