"""Kernel backend selection.

The compiled extension is used when available; set PCAPSTEGO_PURE=1 to
force the pure-Python kernels (useful for the backend benchmark).
"""

import os

from . import _kernels_py

if os.environ.get("PCAPSTEGO_PURE") == "1":
    _impl = _kernels_py
else:
    try:
        from . import _kernels_cy as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _kernels_py

BACKEND = _impl.BACKEND

K_IPV4_ID = _kernels_py.K_IPV4_ID
K_TCP_TSVAL = _kernels_py.K_TCP_TSVAL
K_PAYLOAD_REG = _kernels_py.K_PAYLOAD_REG

checksum16 = _impl.checksum16
tcp_checksum = _impl.tcp_checksum
locate_carrier = _impl.locate_carrier


def backends():
    """All importable kernel backends, for comparison benchmarks."""
    found = {"python": _kernels_py}
    try:
        from . import _kernels_cy
        found["cython"] = _kernels_cy
    except ImportError:
        pass
    return found


def use(name):
    """Rebind the module-level kernels to the named backend."""
    global _impl, BACKEND, checksum16, tcp_checksum, locate_carrier
    _impl = backends()[name]
    BACKEND = _impl.BACKEND
    checksum16 = _impl.checksum16
    tcp_checksum = _impl.tcp_checksum
    locate_carrier = _impl.locate_carrier
