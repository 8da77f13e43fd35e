"""Carleson entropy of a few boundary sets and the split of a measure.

A set on the circle is Beurling-Carleson when the lengths of its
complementary arcs have a finite sum of |I| log(1/|I|).  Here we compute
that sum for finite sets and for two Cantor families, then split a measure
into the part living on such sets and the part that charges none of them.

Run:  python demos/entropy_and_decomposition.py
"""

from modelspace.boundary_measures import (
    ArcSet,
    CantorComponent,
    Family,
    GapSchedule,
    SingularMeasure,
    decompose,
    entropy,
)

print("finite sets")
for pts in ([0.0], [0.0, 0.5], [0.0, 0.25, 0.5, 0.75]):
    print(f"  {len(pts)} equally spaced points: entropy {entropy(ArcSet.from_points(pts)):.6f}")

# Geometric gaps give convergent entropy; gaps of size 2**-n / n**(beta+1)
# converge only for beta > 1.
print("\nCantor sets (value, partial sum, tail bound)")
for label, sched in [
    ("middle thirds", GapSchedule.middle_thirds(depth=40)),
    ("POLYLOG beta=2", GapSchedule(Family.POLYLOG, 2.0, depth=4000)),
    ("POLYLOG beta=1", GapSchedule(Family.POLYLOG, 1.0, depth=4000)),
]:
    e = entropy(sched)
    print(f"  {label:15s} {e.value:10.6f} {e.partial_sum:10.6f} {e.tail_bound:10.3g}")

nu = SingularMeasure(
    atoms=((0.125, 1.0),),
    components=(
        CantorComponent(GapSchedule.middle_thirds(0.25, 0.25, 40), 0.5),
        CantorComponent(GapSchedule(Family.POLYLOG, 1.0, 0.6, 0.3, 4000), 0.3),
    ),
)
dec = decompose(nu)
print("\ndecomposition of atom + middle thirds + POLYLOG(1)")
print(f"  carried by BC sets: mass {dec.bc.total_mass}  ({len(dec.bc.atoms)} atom, {len(dec.bc.components)} Cantor part)")
print(f"  charging none:      mass {dec.kr.total_mass}  ({len(dec.kr.components)} Cantor part)")
for cert in dec.certificates:
    print(f"  certificate: bc={cert.is_bc}  {cert.reason}")
