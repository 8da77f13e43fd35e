"""Smooth approximants of a model-space kernel.

For the inner function exp(-(1+z)/(1-z)) the kernel at lambda has Taylor
coefficients decaying only like n**(-3/4).  Multiplying by the conjugate of
an outer function that vanishes to high order at the atom and projecting
back onto H^2 keeps the result inside the model space while making the
coefficients decay much faster.  The approximants converge to the kernel
as the outer functions tend to one.

A 2**16 grid keeps this quick; the CLI config uses 2**20, which is needed
for the membership residual to stay small at n = 16.

Run:  python demos/kernel_smoothing.py
"""

from modelspace.boundary_measures import SingularMeasure
from modelspace.inner_functions import InnerFunction
from modelspace.smoothing_pipeline import KernelSmoother

theta = InnerFunction.build(measure=SingularMeasure.point_mass(0.0, 1.0))
ks = KernelSmoother(theta, 0.4, N=2**16)
print(f"raw kernel: coefficient decay exponent {ks.kernel_decay().exponent:.3f}")
print(f"{'n':>3} {'H2 error':>10} {'residual':>10} {'decay':>7}")
for n in (2, 4, 8):
    a = ks.approximate(n)
    print(f"{n:3d} {a.h2_error:10.4f} {a.membership_residual:10.2e} {a.decay.exponent:7.2f}")
