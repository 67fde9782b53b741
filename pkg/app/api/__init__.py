"""
API route handlers.
"""

from app.api.algebra import router as algebra_router
from app.api.verification import router as verification_router

__all__ = ["algebra_router", "verification_router"]
