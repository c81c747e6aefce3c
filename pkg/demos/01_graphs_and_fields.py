"""Graphs, conductance fields and empirical measures.

Builds the ring and 2-D torus graph sequences, assigns the four kinds of
conductance field, and shows the empirical measure m_n converging vaguely
to Lebesgue measure against a compactly supported bump.
"""

import numpy as np

from exclusim.conductance import ConductanceField, arithmetic_mean, assign, harmonic_mean
from exclusim.graphs import TestFunction, build_torus_1d, build_torus_2d, vague_discrepancy

# --- the graph sequence -------------------------------------------------
for n in (8, 64, 512):
    g = build_torus_1d(n)
    print(f"ring n={n}: |V|={g.num_vertices} |E|={g.num_edges} a_n={g.a_n:g} b_n={g.b_n:g}")

g2 = build_torus_2d(8)
print(f"2-D torus 8x8: |V|={g2.num_vertices} |E|={g2.num_edges}")

# --- conductance environments -------------------------------------------
print()
g = build_torus_1d(12)
for field in (ConductanceField.constant(1.0),
              ConductanceField.periodic([1.0, 2.0]),
              ConductanceField.iid_uniform(1.0, 2.0, seed=0),
              ConductanceField.iid_pareto(2.5, 1.0, seed=0)):
    gg = assign(field, g)
    print(f"{field.kind:12s} first edges: {np.round(gg.conductance[:6], 3)}")
    print(f"{'':12s} harmonic mean {harmonic_mean(gg):.4f}  "
          f"arithmetic mean {arithmetic_mean(gg):.4f}")

# same seed, same environment -- quenched disorder is reproducible
a = assign(ConductanceField.iid_uniform(1.0, 2.0, seed=7), g).conductance
b = assign(ConductanceField.iid_uniform(1.0, 2.0, seed=7), g).conductance
print("\nidentical redraw with equal seed:", np.array_equal(a, b))

# --- vague convergence m_n -> Lebesgue ----------------------------------
print("\nvague convergence against a bump test function:")
phi = TestFunction.bump([0.3], 0.2)
for n in (16, 64, 256, 1024):
    print(f"  n={n:5d}  |m_n(phi) - int phi| = {vague_discrepancy(build_torus_1d(n), phi):.2e}")
