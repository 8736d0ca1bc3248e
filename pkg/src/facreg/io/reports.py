"""
Report writers: JSON reports and the CSV tables (category statistics and
robustness sweeps). A path of None or "-" writes to standard output.
"""

from __future__ import annotations

import csv
import json
import logging
import sys
from contextlib import contextmanager
from pathlib import Path
from typing import Any, Iterator, Optional, Sequence, TextIO, Tuple, Union

from facreg.evaluation.sweep import CSV_HEADER, SweepRow

logger = logging.getLogger(__name__)

STATS_HEADER = ("building_id", "N", "|P|", "|Z|", "|O|", "|W|", "|H|")

PathLike = Optional[Union[str, Path]]


@contextmanager
def _open(path: PathLike) -> Iterator[TextIO]:
    if path is None or str(path) == "-":
        yield sys.stdout
        return
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        yield fh
    logger.info("Wrote %s", path)


def write_json(data: Any, path: PathLike = None) -> None:
    with _open(path) as fh:
        json.dump(data, fh, indent=2)
        fh.write("\n")


def stats_row(building_id: str, n: int, counts: Tuple[int, ...]) -> Tuple[Any, ...]:
    return (building_id, n, *counts)


def write_stats_csv(rows: Sequence[Tuple[Any, ...]], path: PathLike = None) -> None:
    with _open(path) as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(STATS_HEADER)
        writer.writerows(rows)


def write_sweep_csv(rows: Sequence[SweepRow], path: PathLike = None) -> None:
    with _open(path) as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for row in rows:
            writer.writerow(row.values())
