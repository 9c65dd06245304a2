import logging

from app.core.config import settings

_JSON_FORMAT = (
    '{"time": "%(asctime)s", "level": "%(levelname)s", '
    '"name": "%(name)s", "message": "%(message)s"}'
)


def configure_logging(level: str | None = None) -> None:
    """Verbose plain logs in development, one JSON object per line in production."""
    chosen = level or settings.log_level
    if settings.is_production:
        logging.basicConfig(level=chosen.upper() or logging.INFO, format=_JSON_FORMAT)
    else:
        logging.basicConfig(level=chosen.upper() or logging.DEBUG)
