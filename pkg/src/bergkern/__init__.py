"""Numerical Bergman kernels, pluricomplex Green functions and invariant metrics
on balanced domains, with a verifier for the comparison inequalities between
the Bergman volume and the Busemann volume of the Kobayashi metric."""

from ._version import __version__
from .bergman import KernelValue, exact_kernel, gram_kernel, kernel_density, reinhardt_kernel
from .geometry import ball, disk, nonconvex_example, parse_domain, polydisc, volume
from .green import asymptotic_limit, blocki_lower_bound, green_balanced, green_disk
from .reports import CheckReport

__all__ = [
    "__version__", "KernelValue", "exact_kernel", "gram_kernel", "kernel_density", "reinhardt_kernel",
    "ball", "disk", "nonconvex_example", "parse_domain", "polydisc", "volume", "asymptotic_limit",
    "blocki_lower_bound", "green_balanced", "green_disk", "CheckReport",
]
