import sys

from loguru import logger

from xtal_acoustics.config.settings import get_settings


def setup_logging(level: str | None = None):
    """
    Configure logging for the application.

    Logs go to stderr only; stdout is reserved for JSON/CSV output and summaries.
    """
    settings = get_settings()

    # Remove default handler to avoid duplicate logs
    logger.remove()

    logger.add(
        sys.stderr,
        level=level or settings.logging_level,
        format=settings.logging_format,
        colorize=False,
        backtrace=True,
        diagnose=False,
        catch=True,
    )

    logger.configure(extra={"app": settings.app_name, "version": settings.app_version})

    logger.debug(
        "Logging system initialized",
        log_level=level or settings.logging_level,
        threads=settings.threads,
    )
