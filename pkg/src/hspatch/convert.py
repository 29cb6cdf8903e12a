"""Change of basis for cubic curves and bicubic patches.

For two bases with matrices M_f and M_t, equality of the evaluated curve
c_f^T M_f t = c_t^T M_t t for all t forces c_t^T = c_f^T (M_f M_t^-1).  The
change-of-basis matrices are therefore derived, exactly, from the basis
matrices themselves, and validated by evaluation invariance.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from . import algebra
from .patch import Basis, GeometricPatch, _BASIS_EXACT


@lru_cache(maxsize=None)
def conversion_matrix_exact(src: Basis, dst: Basis) -> algebra.FracMatrix:
    """Exact rational change-of-basis matrix M_src @ M_dst^-1."""
    return algebra.mat_mul(_BASIS_EXACT[src], algebra.mat_inverse_exact(_BASIS_EXACT[dst]))


def conversion_matrix(src: Basis, dst: Basis) -> np.ndarray:
    """Float change-of-basis matrix; controls map as c_dst^T = c_src^T @ C."""
    return algebra.to_float(conversion_matrix_exact(src, dst))


def convert_curve(control, src: Basis, dst: Basis) -> np.ndarray:
    """Re-express a cubic curve 4-vector in another basis."""
    c = np.asarray(control, dtype=float)
    if c.shape != (4,):
        raise ValueError("curve control must be a 4-vector")
    if src is dst:
        return c.copy()
    return c @ conversion_matrix(src, dst)


def convert_patch(patch: GeometricPatch, dst: Basis) -> GeometricPatch:
    """Re-express a patch in another basis.

    Per coordinate the control matrix maps as X_dst = C^T @ X_src @ C with
    C = conversion_matrix(src, dst); evaluation is unchanged.
    """
    if patch.basis is dst:
        return GeometricPatch(patch.x, patch.y, patch.z, patch.basis)
    c = conversion_matrix(patch.basis, dst)
    return GeometricPatch(
        c.T @ patch.x @ c, c.T @ patch.y @ c, c.T @ patch.z @ c, dst
    )
