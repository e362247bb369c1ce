"""Python interface to the irqsim latency simulator.

The heavy lifting happens in the compiled `_core` extension; this wrapper
turns scenario documents and reports into plain dicts and namedtuples so they
compose with the usual analysis stack.
"""

from __future__ import annotations

import json
from collections import namedtuple
from dataclasses import dataclass, field

from . import _core
from ._core import format_duration, parse_duration, preset_names

__all__ = [
    "Sample",
    "RunResult",
    "preset_names",
    "preset_scenario",
    "normalize_scenario",
    "run",
    "run_to_dir",
    "compare",
    "samples_csv",
    "parse_duration",
    "format_duration",
]

Sample = namedtuple("Sample", ["n", "irq_latency_ns", "cs_delay_ns", "overrun"])


@dataclass
class RunResult:
    """One measurement run: the aggregate report plus every per-cycle sample."""

    report: dict
    samples: list = field(default_factory=list)
    report_json: str = ""

    @property
    def overruns(self) -> int:
        return self.report["overrun_count"]

    @property
    def mean_irq_us(self) -> float:
        return self.report["irq_latency"]["mean_us"]

    @property
    def mean_cs_us(self) -> float:
        return self.report["cs_delay"]["mean_us"]


def _as_text(scenario) -> str:
    if isinstance(scenario, str):
        return scenario
    return json.dumps(scenario)


def preset_scenario(name: str) -> dict:
    """The normalized scenario document for a built-in preset, as a dict."""
    return json.loads(_core.preset_scenario(name))


def normalize_scenario(scenario) -> dict:
    """Validates a scenario (dict or JSON text) and returns its normal form."""
    return json.loads(_core.normalize_scenario(_as_text(scenario)))


def run(scenario, seed: int | None = None) -> RunResult:
    """Runs a scenario (dict or JSON text) and collects report plus samples."""
    report_text, rows = _core.run(_as_text(scenario), seed)
    return RunResult(
        report=json.loads(report_text),
        samples=[Sample(*row) for row in rows],
        report_json=report_text,
    )


def run_to_dir(scenario, out_dir, seed: int | None = None, write_samples: bool = False):
    """Runs a scenario and writes the artifact files; returns (dir, report dict)."""
    path, report_text = _core.run_to_dir(_as_text(scenario), str(out_dir), seed, write_samples)
    return path, json.loads(report_text)


def compare(results) -> str:
    """Fixed-layout comparison table over RunResults or report JSON strings."""
    docs = []
    for r in results:
        if isinstance(r, RunResult):
            docs.append(r.report_json)
        elif isinstance(r, dict):
            docs.append(json.dumps(r))
        else:
            docs.append(r)
    return _core.render_table(docs)


def samples_csv(samples) -> str:
    """Renders an iterable of Sample tuples in the on-disk CSV format."""
    return _core.samples_csv([tuple(s) for s in samples])
