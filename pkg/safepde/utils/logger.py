"""Structured logging configuration using structlog."""

import logging
import sys
from pathlib import Path
from typing import Any

import numpy as np
import structlog
from structlog.types import FilteringBoundLogger

from safepde.config import get_settings


_MAX_ARRAY_ITEMS = 8


def compact_numeric(logger, method_name, event_dict):
    """structlog processor: turn numpy values into short plain Python values."""
    for key, value in list(event_dict.items()):
        if isinstance(value, np.generic):
            event_dict[key] = value.item()
        elif isinstance(value, np.ndarray):
            flat = value.ravel()
            items = [float(v) for v in flat[:_MAX_ARRAY_ITEMS]]
            if flat.size > _MAX_ARRAY_ITEMS:
                event_dict[key] = {"head": items, "size": int(flat.size)}
            else:
                event_dict[key] = items
    return event_dict


def configure_logging() -> FilteringBoundLogger:
    """
    Configure structured logging with structlog.

    Returns:
        FilteringBoundLogger: Configured logger instance
    """
    settings = get_settings()

    # Ensure log directory exists
    log_file_path = Path(settings.LOG_FILE)
    log_file_path.parent.mkdir(parents=True, exist_ok=True)

    log_level = getattr(logging, settings.LOG_LEVEL, logging.INFO)

    logging.basicConfig(
        format="%(message)s",
        level=log_level,
        stream=sys.stdout,
    )

    if settings.LOG_FORMAT == "json":
        processors = [
            compact_numeric,
            structlog.contextvars.merge_contextvars,
            structlog.stdlib.add_log_level,
            structlog.stdlib.add_logger_name,
            structlog.processors.TimeStamper(fmt="iso"),
            structlog.processors.StackInfoRenderer(),
            structlog.processors.format_exc_info,
            structlog.processors.UnicodeDecoder(),
            structlog.processors.JSONRenderer(),
        ]
    else:
        # Console-friendly format for interactive runs
        processors = [
            compact_numeric,
            structlog.contextvars.merge_contextvars,
            structlog.stdlib.add_log_level,
            structlog.stdlib.add_logger_name,
            structlog.processors.TimeStamper(fmt="%Y-%m-%d %H:%M:%S"),
            structlog.dev.ConsoleRenderer(),
        ]

    structlog.configure(
        processors=processors,
        wrapper_class=structlog.stdlib.BoundLogger,
        context_class=dict,
        logger_factory=structlog.stdlib.LoggerFactory(),
        cache_logger_on_first_use=True,
    )

    return structlog.get_logger()


def get_logger(name: str = __name__) -> FilteringBoundLogger:
    """
    Get a logger instance with the specified name.

    Args:
        name: Logger name (typically __name__ of the module)

    Returns:
        FilteringBoundLogger: Logger instance
    """
    return structlog.get_logger(name)


def log_run_event(
    logger: FilteringBoundLogger,
    event: str,
    success: bool = True,
    error: str = None,
    **kwargs: Any
) -> None:
    """
    Log a run milestone (start, trigger, fault, completion) in a fixed shape.

    Args:
        logger: Logger instance
        event: Event name, snake_case
        success: Whether the milestone completed normally
        error: Error message if it did not
        **kwargs: Additional context to log
    """
    log_data = {
        "event": event if success else f"{event}_failed",
        "success": success,
        **kwargs
    }

    if error:
        log_data["error"] = error

    if success:
        logger.info(**log_data)
    else:
        logger.error(**log_data)


def log_trigger(
    logger: FilteringBoundLogger,
    t: float,
    mu: float,
    theta_hat,
    feasible_size: int,
    held: bool,
    **kwargs: Any
) -> None:
    """
    Log an identifier trigger outcome.

    Args:
        logger: Logger instance
        t: Trigger time t_{i+1}
        mu: Window start mu_{i+1}
        theta_hat: Estimate after the update
        feasible_size: Number of candidates left in the feasible set
        held: Whether the estimate was held by the small-change rule
        **kwargs: Additional context to log
    """
    log_data = {
        "event": "trigger_processed",
        "t": round(float(t), 6),
        "mu": round(float(mu), 6),
        "theta_hat": [round(float(v), 6) for v in theta_hat],
        "feasible_size": int(feasible_size),
        "held": bool(held),
        **kwargs
    }
    logger.info(**log_data)
