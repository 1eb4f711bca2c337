"""Kernel backend selection.

At import time the compiled extension is preferred; the numpy fallback is
used if the extension is missing or ``MCPARTICLES_BACKEND=numpy`` is set.
``use_backend`` rebinds the shared ``kernels`` namespace in place, so code
that did ``from ._backend import kernels`` follows the switch.
"""

import os
import types

from . import _npkernels

try:
    from . import _kernels as _compiled
except ImportError:  # extension not built
    _compiled = None

_KERNEL_NAMES = [name for name in dir(_npkernels) if name.endswith(("_a", "_s", "_aa", "_as", "_sa"))]

kernels = types.SimpleNamespace()


def available_backends():
    """Names of the backends usable in this process."""
    names = ["numpy"]
    if _compiled is not None:
        names.insert(0, "compiled")
    return names


def use_backend(name):
    """Select the kernel backend ("compiled" or "numpy"). Returns the previous name."""
    previous = getattr(kernels, "name", None)
    if name == "compiled":
        if _compiled is None:
            raise RuntimeError("compiled kernel extension is not available; "
                               "reinstall with a C compiler or use the numpy backend")
        module = _compiled
    elif name == "numpy":
        module = _npkernels
    else:
        raise ValueError(f"unknown backend {name!r}; expected 'compiled' or 'numpy'")
    for attr in _KERNEL_NAMES:
        setattr(kernels, attr, getattr(module, attr))
    kernels.name = module.BACKEND_NAME
    return previous


def backend_name():
    """Name of the active kernel backend."""
    return kernels.name


_forced = os.environ.get("MCPARTICLES_BACKEND")
if _forced is not None:
    use_backend(_forced)
else:
    use_backend("compiled" if _compiled is not None else "numpy")
