"""Kernel backend selection.

Prefers the compiled Cython extension when it is built, otherwise falls
back to the pure-numpy implementation.  Set CONTACTLAB_BACKEND=python or
=cython to force one side; forcing cython when the extension is missing
raises ImportError rather than silently degrading.
"""

import os

_forced = os.environ.get("CONTACTLAB_BACKEND", "").strip().lower()

if _forced == "python":
    from . import _kernels_py as _impl
    BACKEND = "python"
elif _forced == "cython":
    from . import _kernels_cy as _impl  # type: ignore[attr-defined]
    BACKEND = "cython"
elif _forced == "":
    try:
        from . import _kernels_cy as _impl  # type: ignore[attr-defined]
        BACKEND = "cython"
    except ImportError:
        from . import _kernels_py as _impl
        BACKEND = "python"
else:
    raise ValueError(
        f"CONTACTLAB_BACKEND must be 'cython', 'python', or unset, got {_forced!r}"
    )

firing_exponents = _impl.firing_exponents
premise_grad_sums = _impl.premise_grad_sums
batch_winner = _impl.batch_winner
som_train = _impl.som_train
subclust_potentials = _impl.subclust_potentials
