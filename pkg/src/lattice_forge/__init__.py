"""Design, reconstruction and simulation of mirror-symmetric coupled lattices
with perfect state transfer and fractional revival."""

from . import catalog, conditions, inverse, orthopoly, transport
from .catalog import ModelParams, TransportPrediction, couplings, nnn_krawtchouk_prediction, predict_transport, spectrum
from .conditions import ConditionReport, analyze_spectrum, check_fr, check_pst, check_pst_nnn, integer_valued_basis
from .errors import *  # noqa: F401,F403
from .inverse import ReconstructionReport, reconstruct, verify_roundtrip
from .lattice import (
    GeometryParams,
    LatticeSpec,
    PentadiagonalSpec,
    Spectrum,
    build_nnn,
    couplings_to_distances,
    distances_to_couplings,
    mirror_defect,
    validate_mirror_symmetry,
)
from .orthopoly import build_poly_system, chi_n_from_spectrum, weights_from_spectrum
from .transport import (
    EigenSystem,
    TransportEvent,
    detect_events,
    eigendecompose,
    propagate,
    transfer_fidelity,
    verify_event,
)

__version__ = "0.1.0"
