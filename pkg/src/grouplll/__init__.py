"""LLL-style reduction of Gram matrices for SL_g, Sp_2g, SO_2g and G2.

A point of the symmetric space is a Gram matrix ``H = (an)^T (an)`` with
``a`` in the diagonal torus and ``n`` unipotent upper triangular.  The
reduction finds an integral group element ``gamma`` such that
``gamma^T H gamma`` is size reduced and satisfies a Lovász inequality for
every simple root.
"""

from .errors import (DimensionError, DriftError, GroupLLLError, IncompatibleFormError,
                     IterationCapExceeded, NotPositiveDefiniteError, SingularMatrixError,
                     UnknownRootError)
from .generate import Instance, make_instance, random_instance
from .groups import GROUP_KINDS, OMEGA_KINDS, GroupDescriptor, Root, g2, get_group, sl, so, sp
from .iwasawa import (Decomposition, FitResult, IwasawaPair, check_compatible, decompose,
                      fit_iwasawa, from_factor, gram_schmidt, gram_schmidt_exact,
                      iwasawa_decompose, sp_H_to_J, sp_J_to_H, transport)
from .matrix import (RationalMatrix, mat_inverse_exact, mat_mul, snap_to_integers,
                     transpose_conjugate_form)
from .octonions import Octonion, basis_octonion, is_g2_element, oct_mul, oct_q
from .reduction import (ReductionResult, ReductionTrace, classic_lll_reference, is_reduced,
                        lovasz_report, reduce, reflection_step, satisfies_lll_definition,
                        sigma_eval)
from .sizered import (coordinates, coordinates_exact, size_reduce, size_reduce_entries,
                      verify_good_ordering)

__version__ = "0.1.0"
