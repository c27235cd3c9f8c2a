import json
import logging
from typing import Optional

from config import get_settings

logger = logging.getLogger("kantower")


def configure_logging(level: Optional[str] = None):
    if logger.handlers:
        return
    handler = logging.StreamHandler()
    handler.setFormatter(logging.Formatter("%(levelname)s %(message)s"))
    logger.addHandler(handler)
    logger.setLevel((level or get_settings().LOG_LEVEL).upper())


def log_event(
    log_level: str,
    message: str,
    context: Optional[dict] = None,
    source: Optional[str] = None,
):
    try:
        log_entry = {
            "message": message,
            "context": context,
            "source": source,
        }
        logger.log(
            logging.getLevelName(log_level.upper()),
            json.dumps(log_entry, sort_keys=True, default=str),
        )
    except Exception as e:
        logger.error("log_event failed: %s", e)
