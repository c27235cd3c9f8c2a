"""Regression harness: replays every recorded CLI case and diffs the reports byte for byte."""

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, List, Tuple

from errors import InvalidArgument
from logs import log_event
from models import Command, FixtureCase, Report, canonical_json

FIXTURE_DIR = Path(__file__).resolve().parent / "fixtures"
CASES_FILE = "cases.json"


@dataclass(frozen=True)
class FixtureResult:
    name: str
    passed: bool
    exit_code: int
    detail: str = ""

    def to_dict(self) -> dict:
        return {"name": self.name, "passed": self.passed, "exit_code": self.exit_code, "detail": self.detail}


@dataclass(frozen=True)
class FixtureSummary:
    results: Tuple[FixtureResult, ...]

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    @property
    def failures(self) -> List[str]:
        return [r.name for r in self.results if not r.passed]

    @property
    def exit_code(self) -> int:
        """0 when everything matches; a cap or internal failure wins over a plain mismatch."""
        if self.passed:
            return 0
        return max(
            [2] + [r.exit_code for r in self.results if not r.passed and r.exit_code in (3, 4)]
        )

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "total": len(self.results),
            "failures": self.failures,
            "results": [r.to_dict() for r in self.results],
        }


def load_cases(directory: Path) -> List[FixtureCase]:
    path = Path(directory) / CASES_FILE
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as e:
        raise InvalidArgument(f"cannot load fixture cases from {path}: {e}") from None
    return [FixtureCase.model_validate(entry) for entry in raw]


def fixture_check(
    runner: Callable[[Command], Tuple[Report, int]],
    render: Callable[[Report], str],
    directory: Path = FIXTURE_DIR,
) -> FixtureSummary:
    results = []
    for case in load_cases(directory):
        cmd = Command(
            verb=case.verb,
            options=case.options,
            inputs=[str(Path(directory) / name) for name in case.inputs],
        )
        report, code = runner(cmd)
        actual = render(report)
        expected = canonical_json(case.report)
        if code != case.exit_code:
            detail = f"exit code {code}, expected {case.exit_code}"
        elif actual != expected:
            detail = f"report differs: got {actual}"
        else:
            detail = ""
        results.append(FixtureResult(case.name, not detail, code, detail))
        if detail:
            log_event("warning", "fixture mismatch", {"case": case.name, "detail": detail}, source="fixtures.fixture_check")
    return FixtureSummary(tuple(results))
