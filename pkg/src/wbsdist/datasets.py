"""Built-in datasets and input-file parsing.

Two classic reliability datasets ship with the package: the Meeker &
Escobar device failure/running times (n=30, bathtub-shaped hazard) and
the turbocharger failure times of Xu et al. (n=40, increasing hazard).
Each registry entry records a SHA-256 checksum of its canonical text
form so accidental edits are caught by the test suite.
"""

from __future__ import annotations

import csv
import hashlib
from dataclasses import dataclass

from .errors import DataError
from .mle import Sample

__all__ = ["Dataset", "REGISTRY", "get_dataset", "load_observations", "checksum"]


@dataclass(frozen=True)
class Dataset:
    name: str
    values: Sample
    source: str


def checksum(values) -> str:
    """SHA-256 of the comma-joined repr of the observations."""
    text = ",".join(repr(float(v)) for v in values)
    return hashlib.sha256(text.encode("ascii")).hexdigest()


_MEEKER = (
    2, 10, 13, 23, 23, 28, 30, 65, 80, 88, 106, 143, 147, 173, 181, 212,
    245, 247, 261, 266, 275, 293, 300, 300, 300, 300, 300, 300, 300, 300,
)

_TURBOCHARGER = (
    1.6, 2.0, 2.6, 3.0, 3.5, 3.9, 4.5, 4.6, 4.8, 5.0,
    5.1, 5.3, 5.4, 5.6, 5.8, 6.0, 6.0, 6.1, 6.3, 6.5,
    6.5, 6.7, 7.0, 7.1, 7.3, 7.3, 7.3, 7.7, 7.7, 7.8,
    7.9, 8.0, 8.1, 8.3, 8.4, 8.4, 8.5, 8.7, 8.8, 9.0,
)

REGISTRY: dict[str, Dataset] = {
    "meeker": Dataset(
        name="meeker",
        values=Sample.from_values(_MEEKER),
        source="Meeker & Escobar (1998), p. 383: failure and running times of 30 devices",
    ),
    "turbocharger": Dataset(
        name="turbocharger",
        values=Sample.from_values(_TURBOCHARGER),
        source="Xu, Xie, Tang & Ho (2003): time to failure (10^3 h) of 40 turbochargers",
    ),
}

# frozen checksums of the embedded data; verified by the test suite
CHECKSUMS = {
    "meeker": "27c1e250b23995596fb2532cbeb2dfebf51bdef913d76b48fd9c386847025241",
    "turbocharger": "fa4246f913e6f1c726aaca9190ce6dc64af7df7b4e31598ba29e267497225d7a",
}


def get_dataset(name: str) -> Dataset:
    try:
        return REGISTRY[name]
    except KeyError:
        known = ", ".join(sorted(REGISTRY))
        raise DataError(f"unknown dataset {name!r}; built-ins are: {known}") from None


def load_observations(path: str, column: str | int | None = None) -> Sample:
    """Read positive observations from a text or CSV file.

    Plain text: one observation per line, '#' starts a comment.  CSV:
    pass ``column`` (name or 0-based index) to select the field.
    Nonpositive or unparseable entries raise DataError with the line
    number.
    """
    if column is not None:
        return _load_csv(path, column)
    values = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            for token in line.replace(",", " ").split():
                try:
                    val = float(token)
                except ValueError:
                    raise DataError(
                        f"{path}: unparseable observation {token!r} at line {lineno}"
                    ) from None
                if not val > 0.0:
                    raise DataError(
                        f"{path}: nonpositive observation at line {lineno}"
                    )
                values.append(val)
    if not values:
        raise DataError(f"{path}: no observations found")
    return Sample.from_values(values)


def _load_csv(path: str, column: str | int) -> Sample:
    values = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        sniff = fh.read(4096)
        fh.seek(0)
        has_header = csv.Sniffer().has_header(sniff) if sniff.strip() else False
        reader = csv.reader(fh)
        rows = list(reader)
    if not rows:
        raise DataError(f"{path}: empty file")
    start = 0
    if isinstance(column, str):
        header = [h.strip() for h in rows[0]]
        if column not in header:
            raise DataError(f"{path}: no column named {column!r}")
        idx = header.index(column)
        start = 1
    else:
        idx = int(column)
        if has_header:
            start = 1
    for lineno, row in enumerate(rows[start:], start=start + 1):
        if not row or all(not cell.strip() for cell in row):
            continue
        try:
            val = float(row[idx])
        except (ValueError, IndexError):
            raise DataError(
                f"{path}: unparseable observation at line {lineno}"
            ) from None
        if not val > 0.0:
            raise DataError(f"{path}: nonpositive observation at line {lineno}")
        values.append(val)
    if not values:
        raise DataError(f"{path}: no observations found")
    return Sample.from_values(values)
