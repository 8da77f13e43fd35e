"""Bergman distance from 1 to the polynomial multiples of an inner function.

If S is cyclic in the Bergman space the distances d_N shrink to zero as the
polynomial degree N grows.  A single atom is not cyclic and its curve
levels off; a Cantor measure whose gaps have divergent entropy is cyclic
and its curve keeps falling, though slowly.

Run:  python demos/bergman_cyclicity.py
"""

from modelspace.bergman_lab import DiscFunction, cauchy_pairing_disc, cyclicity_curve
from modelspace.boundary_measures import CantorComponent, Family, GapSchedule, SingularMeasure
from modelspace.inner_functions import InnerFunction

degrees = (5, 10, 20, 40)
atom = InnerFunction.build(measure=SingularMeasure.point_mass(0.0, 1.0))
cantor = InnerFunction.build(
    measure=SingularMeasure(components=(CantorComponent(GapSchedule(Family.POLYLOG, 1.0), 0.3),)),
    level=9,
)
print("degree " + " ".join(f"{d:>8d}" for d in degrees))
for name, S in (("atom", atom), ("cantor", cantor)):
    d = cyclicity_curve(S, degrees).distances
    print(f"{name:6s} " + " ".join(f"{x:8.4f}" for x in d))

# the H^2 pairing of two polynomials equals a weighted area integral
f = DiscFunction.polynomial([1.0, 2.0, -1j])
g = DiscFunction.polynomial([0.5, 0.0, 3.0])
r = cauchy_pairing_disc(f, g)
print(f"\npairing: boundary {r.lhs:.12f}  disc {r.rhs:.12f}")
