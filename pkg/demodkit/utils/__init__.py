import inspect
import os
import zlib
from pathlib import Path


MAX_REPR_DEPTH = 10

_repr_depth = [0]


def nice_repr(cls):
    """
    A decorator that adds a nice `repr(.)` to any decorated class.

    Decorate a class with `@nice_repr` to automatically generate a `__repr__()`
    method that prints the class name along with any parameters defined in the
    constructor which can be found in `dir(self)`.

    ##### Examples

    All of the parameters that you want to be printed in `repr(.)` should
    be either stored in the instance or accesible by name (e.g., as a property).

    ```python
    >>> @nice_repr
    ... class FadingSpec:
    ...     def __init__(self, max_doppler_hz, symbol_rate_hz):
    ...         self.max_doppler_hz = max_doppler_hz
    ...         self._symbol_rate_hz = symbol_rate_hz
    ...
    >>> FadingSpec(30, symbol_rate_hz=1e6)
    FadingSpec(max_doppler_hz=30)

    ```

    !!! note
        Change `demodkit.utils.MAX_REPR_DEPTH` to increase the depth level of recursive `repr`.

    """

    def repr_method(self):
        init_signature = inspect.signature(self.__init__)
        exclude_param_names = set(["self"])

        if _repr_depth[0] > MAX_REPR_DEPTH:
            return f"{self.__class__.__name__}(...)"

        _repr_depth[0] += 1

        parameter_names = [
            name
            for name, param in init_signature.parameters.items()
            if name not in exclude_param_names
            and param.kind not in (param.VAR_POSITIONAL, param.VAR_KEYWORD)
        ]
        parameter_values = [getattr(self, param, None) for param in parameter_names]

        if hasattr(self, "__nice_repr_hook__"):
            self.__nice_repr_hook__(parameter_names, parameter_values)

        args = ", ".join(
            f"{name}={repr(value)}"
            for name, value in zip(parameter_names, parameter_values)
            if value is not None
        )
        fr = f"{self.__class__.__name__}({args})"

        _repr_depth[0] -= 1

        try:
            import black

            return black.format_str(fr, mode=black.FileMode()).strip()
        except Exception:
            return fr

    cls.__repr__ = repr_method
    return cls


DATA_PATH = Path(os.environ.get("DEMODKIT_HOME", Path.home() / ".demodkit"))


def datapath(path: str) -> Path:
    """
    Returns a `Path` object that points to `path` inside the demodkit data folder,
    where trained models and reproduced figures are stored by default.

    The folder defaults to `~/.demodkit` and can be moved with the
    `DEMODKIT_HOME` environment variable.
    """
    return Path(DATA_PATH) / path


def stable_hash(value) -> int:
    """
    Hashes strings (and anything with a stable `str`) to a 32-bit integer,
    identically across processes and interpreter runs.

    ##### Examples

    ```python
    >>> stable_hash("qam16") == stable_hash("qam16")
    True
    >>> stable_hash(3)
    3

    ```
    """
    if isinstance(value, (int,)) and value >= 0:
        return int(value)

    return zlib.crc32(str(value).encode("utf8"))


from ._process import run_parallel, default_workers
