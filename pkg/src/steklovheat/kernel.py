"""Kernel backend selection.

The compiled Cython kernel is used when importable, the pure-Python twin
otherwise.  ``set_backend`` rebinds the module-level function names, so code
that calls ``kernel.jet_mul`` etc. follows the switch; the benchmark uses
this to compare both backends on identical workloads.
"""

from . import _kernel_py

try:
    from . import _kernel_cy
except ImportError:
    _kernel_cy = None

_BACKENDS = {"python": _kernel_py}
if _kernel_cy is not None:
    _BACKENDS["cython"] = _kernel_cy

_EXPORTED = [
    "q_norm", "q_add", "q_sub", "q_neg", "q_mul", "q_div", "q_is_zero",
    "jet_add", "jet_neg", "jet_scale", "jet_mul", "jet_diff",
    "jet_truncate", "jet_eval0",
]

Q_ZERO = _kernel_py.Q_ZERO
Q_ONE = _kernel_py.Q_ONE
Q_I = _kernel_py.Q_I

_active = "cython" if _kernel_cy is not None else "python"


def available_backends():
    return sorted(_BACKENDS)


def backend_name():
    return _active


def set_backend(name):
    global _active
    if name not in _BACKENDS:
        raise ValueError(f"unknown kernel backend {name!r}; available: {available_backends()}")
    mod = _BACKENDS[name]
    for fn in _EXPORTED:
        globals()[fn] = getattr(mod, fn)
    _active = name


set_backend(_active)
