from __future__ import annotations

import json
import logging
import sys
import time
from contextlib import contextmanager
from typing import Any, Dict, Iterator, Optional, TextIO

from prometheus_client import CollectorRegistry, Counter, Histogram

logger = logging.getLogger("seifert_obstruct")
logger.setLevel(logging.WARNING)

REGISTRY = CollectorRegistry(auto_describe=True)

STAGE_LATENCY_MS = Histogram(
    "stage_latency_ms",
    "Latency of expensive computation stages in milliseconds",
    labelnames=("stage",),
    buckets=(1, 5, 10, 50, 100, 500, 1000, 5000, 30000),
    registry=REGISTRY,
)
VERDICTS = Counter("obstruction_verdict_total", "Obstruction verdicts", labelnames=("verdict",), registry=REGISTRY)
FIRED_RULES = Counter("obstruction_rule_fired_total", "Fired obstruction rules", labelnames=("rule",), registry=REGISTRY)
DISTINCTIONS = Counter("distinction_total", "Distinction checks", labelnames=("distinct",), registry=REGISTRY)
DESCRIPTORS = Counter("descriptor_built_total", "Descriptors constructed", labelnames=("origin",), registry=REGISTRY)

_handler: Optional[logging.StreamHandler] = None


def configure_logging(level: str = "WARNING", stream: Optional[TextIO] = None) -> None:
    """Attach the package handler once; later calls only retarget the stream and level."""
    global _handler
    if _handler is None:
        _handler = logging.StreamHandler(stream or sys.stderr)
        _handler.setFormatter(logging.Formatter("%(message)s"))
        logger.addHandler(_handler)
        logger.propagate = False
    elif stream is not None:
        _handler.setStream(stream)
    logger.setLevel(level.upper())


def _json_default(value: Any) -> str:
    return str(value)


def structured_log(event: str, **payload: Any) -> None:
    entry: Dict[str, Any] = {"event": event, **payload}
    logger.info(json.dumps(entry, default=_json_default, sort_keys=True))


@contextmanager
def span(name: str, **attributes: Any) -> Iterator[Dict[str, Any]]:
    started = time.perf_counter()
    context: Dict[str, Any] = dict(attributes)
    try:
        yield context
    finally:
        elapsed_ms = (time.perf_counter() - started) * 1000
        STAGE_LATENCY_MS.labels(stage=name).observe(elapsed_ms)
        if logger.isEnabledFor(logging.DEBUG):
            logger.debug(json.dumps({"span": name, "ms": round(elapsed_ms, 3), **context}, default=_json_default))


def metric_value(name: str, **labels: str) -> float:
    """Current value of a registered sample, 0.0 when the label set was never touched."""
    return REGISTRY.get_sample_value(name, labels) or 0.0


def record_verdict(verdict: str, rules: list[str]) -> None:
    VERDICTS.labels(verdict=verdict).inc()
    for rule in rules:
        FIRED_RULES.labels(rule=rule).inc()


def record_distinction(distinct: bool) -> None:
    DISTINCTIONS.labels(distinct=str(distinct).lower()).inc()


def record_descriptor(origin: str) -> None:
    DESCRIPTORS.labels(origin=origin).inc()
