"""Grid expansion and concurrent verification of identity cases."""

import asyncio
import json
import logging
from concurrent.futures import ThreadPoolExecutor
from itertools import product
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from config import settings
from services.delta import parse_delta
from services.errors import ConfigError, ParseError
from services.identity_engine import IdentityCase, Theorem, VerificationReport, as_literal, verify
from services.precision import PrecisionContext, parse_scalar
from services.summation import Mode


logger = logging.getLogger(__name__)


class IndexRange(BaseModel):
    """Inclusive range of i values, written {"from": 0, "to": 9}."""

    model_config = ConfigDict(populate_by_name=True)

    start: int = Field(alias="from")
    stop: int = Field(alias="to")

    def values(self) -> List[int]:
        return list(range(self.start, self.stop + 1))


class GridSpec(BaseModel):
    """A JSON sweep description; expands to a Cartesian product of cases."""

    theorems: List[Theorem] = []
    rho: List[str] = []
    i: Union[List[int], IndexRange] = [0]
    x: List[str] = []
    delta: List[str] = ["const:1"]
    mode: List[Mode] = [Mode.CORRECTED]
    cases: List[IdentityCase] = []

    @field_validator("rho", "x", mode="before")
    @classmethod
    def _literals(cls, value: Any) -> Any:
        if not isinstance(value, list):
            value = [value]
        return [as_literal(v) for v in value]

    @field_validator("theorems", "delta", "mode", mode="before")
    @classmethod
    def _listify(cls, value: Any) -> Any:
        return value if isinstance(value, list) else [value]

    def expand(self) -> List[IdentityCase]:
        """Deduplicated cases in listed order, explicit cases last."""
        indices = self.i.values() if isinstance(self.i, IndexRange) else self.i
        generated = [
            IdentityCase(theorem=theorem, rho=rho, i=i, x=x, delta=delta, mode=mode)
            for theorem, rho, i, x, delta, mode in product(
                self.theorems, self.rho, indices, self.x, self.delta, self.mode
            )
        ]
        seen: Dict[tuple, IdentityCase] = {}
        for case in generated + list(self.cases):
            seen.setdefault(case.key, case)
        return list(seen.values())

    def check_literals(self, ctx: PrecisionContext) -> None:
        """Parse every scalar and sequence literal up front; raises ParseError."""
        for text in self.rho + self.x:
            parse_scalar(text, ctx)
        for text in self.delta:
            parse_delta(text).bind(ctx)
        for case in self.cases:
            parse_scalar(case.rho, ctx)
            parse_scalar(case.x, ctx)
            case.delta.bind(ctx)


def load_grid(path: Union[str, Path], ctx: Optional[PrecisionContext] = None) -> GridSpec:
    """Read a grid file; unreadable or invalid grids are configuration errors."""
    try:
        with open(path, "r") as f:
            data = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigError(f"Cannot read grid {path}: {e}") from e
    try:
        grid = GridSpec.model_validate(data)
        grid.check_literals(ctx or PrecisionContext.from_settings())
    except (ValidationError, ParseError) as e:
        raise ConfigError(f"Invalid grid {path}: {e}") from e
    return grid


class SweepService:
    """Runs verify over many cases on a thread pool."""

    def __init__(self, workers: Optional[int] = None):
        self.workers = workers or settings.workers
        if self.workers < 1:
            raise ConfigError(f"workers must be positive, got {self.workers}")

    def _verify_one(self, case: IdentityCase, ctx: PrecisionContext) -> VerificationReport:
        report = verify(case, ctx)
        logger.info(f"{case.label}: {report.verdict.value}")
        return report

    async def run(self, cases: List[IdentityCase], ctx: PrecisionContext) -> List[VerificationReport]:
        """Reports in case order, whatever order the workers finish in."""
        logger.info(f"Sweeping {len(cases)} cases on {self.workers} worker(s) at {ctx.digits} digits")
        loop = asyncio.get_event_loop()
        with ThreadPoolExecutor(max_workers=self.workers) as pool:
            futures = [loop.run_in_executor(pool, self._verify_one, case, ctx) for case in cases]
            reports = await asyncio.gather(*futures)
        return list(reports)

    def run_sync(self, cases: List[IdentityCase], ctx: PrecisionContext) -> List[VerificationReport]:
        return asyncio.run(self.run(cases, ctx))
