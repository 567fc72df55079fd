"""para-Krawtchouk bi-lattice: unbalanced revival and late transfer.

With N=4 and delta=3/5 the two interleaved ladders give a revival at Z=pi
with mixing angle 3pi/10 and transfer only at Z=5pi.  With an irrational
offset each ladder still rephases at Z=pi, so the revival survives while
transfer disappears; the condition checker sees both from the spectrum alone.

Run: python demos/para_krawtchouk_fr.py
"""

import math

import numpy as np

from lattice_forge import catalog, conditions, transport
from lattice_forge.catalog import ModelParams

params = ModelParams("para_krawtchouk", 4, delta=0.6)
spec = catalog.spectrum(params)
print("spectrum", spec.eigenvalues)

report = conditions.analyze_spectrum(spec)
print(f"PST from spectrum: Z={report.pst.distance / math.pi:.4f} pi, multipliers {report.pst.multipliers}")
for fr in report.fr[:4]:
    print(f"  {fr.kind:<6} Z={fr.distance / math.pi:.4f} pi theta={fr.theta / math.pi:.4f} pi")

system = transport.eigendecompose(catalog.couplings(params))
zs = np.linspace(0, 6 * math.pi, 7)
print("fidelity |E_4|^2 at multiples of pi:", np.round(transport.transfer_fidelity(system, zs), 6))
ev = transport.detect_events(system, 1.1 * math.pi)[0]
print(f"first event z={ev.z / math.pi:.6f} pi, theta={ev.theta / math.pi:.6f} pi, leakage={ev.leakage:.1e}")

# irrational offset: revival at pi with an irrational angle, no transfer
tilted = ModelParams("para_krawtchouk", 4, delta=math.sqrt(2) - 0.4)
rep = conditions.analyze_spectrum(catalog.spectrum(tilted))
first = rep.fr[0]
print(f"delta = sqrt(2)-0.4: PST {rep.pst}, first revival Z={first.distance / math.pi:.4f} pi theta={first.theta:.6f}")
ev = transport.detect_events(transport.eigendecompose(catalog.couplings(tilted)), 1.1 * math.pi)[0]
print(f"  simulated z={ev.z / math.pi:.6f} pi theta={ev.theta:.6f} leakage={ev.leakage:.1e}")
