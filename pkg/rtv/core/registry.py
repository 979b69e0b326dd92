"""
RTV Registry

Decorator registry of the triangulation methods compared by the experiments.
"""
from typing import Any, Callable, Dict, List, TypeVar

F = TypeVar('F', bound=Callable[..., Any])

_METHODS: Dict[str, Callable[..., Any]] = {}


def triangulation_method(name: str) -> Callable[[F], F]:
    """Decorator to register a triangulation method under `name`.

    Args:
        name: Method name as written in result files

    Returns:
        Decorator returning the function unchanged
    """
    def decorator(f: F) -> F:
        if name in _METHODS:
            raise ValueError(f"Triangulation method already registered: {name}")
        setattr(f, "__rtv_method__", name)
        _METHODS[name] = f
        return f

    return decorator


def get_method(name: str) -> Callable[..., Any]:
    if name not in _METHODS:
        raise KeyError(f"Unknown triangulation method: {name}")
    return _METHODS[name]


def method_names() -> List[str]:
    return list(_METHODS)
