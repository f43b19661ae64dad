from .runner import ALLOWED_MODULES, FUNCTION_NAME, Session, main, serve

__all__ = ["ALLOWED_MODULES", "FUNCTION_NAME", "Session", "main", "serve"]
