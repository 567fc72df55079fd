"""q-Racah lattice with N=9, K=6: fractional revival at pi/4, transfer at pi/2.

Run: python demos/q_racah_revival.py
"""

import math

import numpy as np

from lattice_forge import catalog, transport
from lattice_forge.catalog import ModelParams

params = ModelParams("q_racah", 9, beta=0.5, big_k=6)
lattice = catalog.couplings(params)
print("couplings     ", np.array2string(lattice.couplings, precision=4))
print("site constants", np.array2string(lattice.site_constants, precision=4))

# closed-form predictions
for p in catalog.predict_transport(params):
    print(f"predicted {p.kind:<4} Z={p.distance:.6f} theta={p.mixing_angle:.6f}")

# simulation from site 0
system = transport.eigendecompose(lattice)
for ev in transport.detect_events(system, 2.0):
    p0, pn = ev.end_probabilities
    print(f"detected  {ev.kind:<4} z={ev.z:.6f} |E_0|^2={p0:.4f} |E_9|^2={pn:.4f} leakage={ev.leakage:.1e}")

# population profile at the two events
for z in (math.pi / 4, math.pi / 2):
    prob = np.abs(transport.amplitudes(system, z)) ** 2
    print(f"z={z:.4f}", np.array2string(prob, precision=3, suppress_small=True))
