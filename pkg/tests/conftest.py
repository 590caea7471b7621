import numpy as np
import pytest

from abdsolve import Dims, random_system

LAM_SET = ("SCSR", "SCBR", "BCSR", "BCBR", "ABTR", "DBTC")
LOCAL_SET = LAM_SET + ("SRSR", "SRSC", "SCSC", "SRBR", "BCSC")


def make_zero_lead_system(dims: Dims, seed: int):
    """Nonsingular system whose leading pivot is exactly zero."""
    from abdsolve import assemble_dense

    for bump in range(6):
        system, z_true = random_system(dims, seed + 1000 * bump, conditioning=0.0)
        system.top[0, 0] = 0.0
        G = assemble_dense(system)
        s = np.linalg.svd(G, compute_uv=False)
        if s[-1] > 1e-6 * s[0]:
            system.rhs = G @ z_true
            return system, z_true
    raise RuntimeError("could not build a nonsingular zero-lead system")
