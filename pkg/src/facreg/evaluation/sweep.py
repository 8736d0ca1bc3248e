"""
Robustness Sweep

For every (level, seed): perturb the truth, regularize the noisy layout and
score both against the truth. A cell whose regularization fails keeps its
initial scores and reports nan for the regularized ones.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple

from facreg.core.config import Config
from facreg.core.regularizer import regularize
from facreg.errors import FacregError
from facreg.evaluation.metrics import prf
from facreg.evaluation.noise import NoiseSpec, perturb
from facreg.models.layout import Layout

logger = logging.getLogger(__name__)

CSV_HEADER = ("level", "seed", "p_init", "r_init", "f_init", "p_reg", "r_reg", "f_reg")


@dataclass(frozen=True)
class SweepRow:
    level: int
    seed: int
    p_init: float
    r_init: float
    f_init: float
    p_reg: float
    r_reg: float
    f_reg: float
    status: str = "optimal"

    @property
    def failed(self) -> bool:
        return math.isnan(self.f_reg)

    def values(self) -> Tuple[Any, ...]:
        return tuple(getattr(self, name) for name in CSV_HEADER)

    def to_dict(self) -> Dict[str, Any]:
        return {**dict(zip(CSV_HEADER, self.values())), "status": self.status}


def run_cell(truth: Layout, level: int, seed: int, config: Optional[Config] = None) -> SweepRow:
    """One sweep cell; never raises on facreg errors"""
    noisy = perturb(truth, NoiseSpec.for_truth(truth, level, seed))
    init = prf(noisy, truth)
    try:
        regularized, report = regularize(noisy, config)
    except FacregError as e:
        logger.warning("Sweep cell level=%d seed=%d failed: %s", level, seed, e)
        nan = float("nan")
        return SweepRow(
            level, seed, init.precision, init.recall, init.f_score, nan, nan, nan,
            status=f"failed: {type(e).__name__}",
        )
    reg = prf(regularized, truth)
    return SweepRow(
        level, seed,
        init.precision, init.recall, init.f_score,
        reg.precision, reg.recall, reg.f_score,
        status=report.status.value,
    )


def robustness_sweep(
    truth: Layout,
    levels: Sequence[int],
    seeds: Sequence[int],
    config: Optional[Config] = None,
    workers: int = 1,
) -> List[SweepRow]:
    """
    Run every (level, seed) cell.

    Returns:
        Rows sorted by (level, seed) whatever order the workers finish in
    """
    cells = [(level, seed) for level in levels for seed in seeds]
    logger.info("Sweep over %d levels x %d seeds (%d workers)", len(levels), len(seeds), workers)

    if workers > 1 and len(cells) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(run_cell, truth, lv, sd, config) for lv, sd in cells]
            rows = [f.result() for f in futures]
    else:
        rows = [run_cell(truth, lv, sd, config) for lv, sd in cells]

    return sorted(rows, key=lambda r: (r.level, r.seed))
