"""Exact-arithmetic checks for Dehn surgeries on fibered links and L-space links."""

__version__ = "0.1.0"

from .slopes import (TorusSlope, FramingChange, FdtcData, intersection, delta, change_frame,
                     degeneracy_from_fdtc, parse_slope, format_slope)
from .homology import (LinkingMatrix, SurgerySpec, SurgeryDeterminant, presentation_matrix, h1_order,
                       f_eval, affine_decompose, ostrowski_bound, positivity_certificate, is_odd_order,
                       chain_link, hopf_link)
from .lspace import (MediantSplit, CertificateTree, farey_split, certificate_tree, verify_additivity)
from .chain import (ChainParams, ProngProfile, chain_framings, chain_degeneracy_slopes, fried_prongs,
                    inequivalence_certificate, euler_prong_check, birkhoff_sign_check,
                    knot_surgery_check, theorem_main_verifier)
