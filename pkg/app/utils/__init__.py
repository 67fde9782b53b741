from .retry import retry_on_insufficient_precision

__all__ = ["retry_on_insufficient_precision"]
