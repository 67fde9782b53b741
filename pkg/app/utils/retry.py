import logging
from functools import wraps
from typing import Any, Callable, TypeVar

from app.exceptions import DepthExceeded, InsufficientPrecision

logger = logging.getLogger(__name__)

T = TypeVar('T')


def retry_on_insufficient_precision(
    max_attempts: int = 2,
    depth_step: int = 2,
    exceptions: tuple = (InsufficientPrecision, DepthExceeded)
):
    """Re-run a computation at a deeper truncation when it runs out of precision.

    The wrapped callable must take its truncation depth as the keyword
    argument `depth`.
    """
    def decorator(func: Callable[..., Any]) -> Callable[..., Any]:
        @wraps(func)
        def wrapper(*args: Any, depth: int, **kwargs: Any) -> Any:
            last_exception = None

            for attempt in range(1, max_attempts + 1):
                try:
                    return func(*args, depth=depth, **kwargs)

                except exceptions as e:
                    last_exception = e

                    if attempt == max_attempts:
                        logger.error(
                            f"{func.__name__} failed after {max_attempts} attempts "
                            f"(last depth {depth}). Last error: {str(e)}"
                        )
                        raise

                    logger.warning(
                        f"{func.__name__} attempt {attempt}/{max_attempts} at depth {depth} failed: {str(e)}. "
                        f"Retrying at depth {depth + depth_step}..."
                    )

                    depth += depth_step

            if last_exception:
                raise last_exception

        return wrapper
    return decorator
