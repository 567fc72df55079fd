"""From a chosen spectrum to couplings, separations and a verified transfer.

Pick eigenvalues whose consecutive gaps are odd multiples of one unit, build
the unique mirror-symmetric lattice with that spectrum, check the transfer
distance it predicts, and convert the couplings to waveguide separations.

Run: python demos/inverse_walkthrough.py
"""

import numpy as np

from lattice_forge import conditions, transport
from lattice_forge.inverse import reconstruct
from lattice_forge.lattice import GeometryParams, Spectrum, couplings_to_distances

spec = Spectrum([-3.0, -2.0, 1.0, 2.0, 5.0, 6.0])  # gaps 1, 3, 1, 3, 1
rep = reconstruct(spec)
lat = rep.lattice
print("couplings     ", np.array2string(lat.couplings, precision=6))
print("site constants", np.array2string(lat.site_constants, precision=6))
print(f"residual {rep.residual_spectrum_error:.1e}, mirror defect {rep.mirror_defect:.1e}")
print("U_n per step  ", [f"{u:.4f}" for u in rep.per_step_u])

pst = conditions.check_pst(spec)
print(f"PST at Z={pst.distance:.6f} with multipliers {pst.multipliers}")

system = transport.eigendecompose(lat)
print(f"simulated fidelity at Z: {transport.transfer_fidelity(system, pst.distance):.12f}")

geom = GeometryParams(amplitude_A=5.0, decay_C=1.2)
print("separations   ", np.array2string(couplings_to_distances(lat, geom), precision=4))
