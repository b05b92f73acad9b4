from collections import OrderedDict
from io import StringIO
from typing import Callable, Any, Tuple
import sys
import functools
import threading


def log(message: str) -> None:
    """Print a diagnostic line to standard error, leaving stdout to the emitted records.

    Args:
        message (str): The diagnostic message.
    """
    print(message, file=sys.stderr)


def capture_logs(func: Callable[..., Any]) -> Callable[..., Tuple[Any, str]]:
    """A decorator that captures the diagnostic lines written to standard error (stderr)
    by the decorated function and returns them along with the function's result.

    Args:
        func (Callable[..., Any]): The function to be decorated. It can take any number of arguments of any type
            and return a value of any type.

    Returns:
        Callable[..., Tuple[Any, str]]: A wrapper function returning a tuple of the function's result and the captured
            diagnostic lines.
    """
    @functools.wraps(func)
    def wrapper(*args: Any, **kwargs: Any) -> Tuple[Any, str]:
        captured_stderr = sys.stderr
        sys.stderr = captured_buffer = StringIO()

        try:
            result = func(*args, **kwargs)
        finally:
            sys.stderr = captured_stderr

        captured_logs = captured_buffer.getvalue()
        return result, captured_logs

    return wrapper


def data_cache(maxsize: int = 128) -> Callable[..., Callable[..., Any]]:
    """A thread-safe least-recently-used cache for expensive solves.

    Every argument of the decorated function must be hashable (frozen pydantic models, tuples and scalars).
    Results are shared between callers, so they must be immutable.

    Args:
        maxsize (int, optional): The maximum number of entries the cache can hold.
            If the number of cached entries exceeds this value, the least recently used entry is evicted. Default is 128.

    Returns:
        Callable: The cache decorator.
    """
    def decorator(func: Callable[..., Any]) -> Callable[..., Any]:
        cache = OrderedDict()
        lock = threading.Lock()

        @functools.wraps(func)
        def wrapper(*args: Any, **kwargs: Any) -> Any:
            key = (args, frozenset(kwargs.items()))

            with lock:
                if key in cache:
                    cache.move_to_end(key)
                    log(f"Cache hit: {func.__name__}{args}, {kwargs}")
                    return cache[key]

            # solve outside the lock so that distinct keys run concurrently
            result = func(*args, **kwargs)
            with lock:
                if key not in cache and len(cache) >= maxsize:
                    log("Cache full: removing the least recently used item")
                    cache.popitem(last=False)
                cache[key] = result

            return result

        wrapper.cache_clear = cache.clear
        return wrapper

    return decorator
