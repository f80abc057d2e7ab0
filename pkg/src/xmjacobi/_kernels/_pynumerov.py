"""Pure-Python Numerov recurrence, used when the compiled kernel is unavailable."""

import numpy as np


def numerov(f, psi, h2, limit):
    """Same contract as the compiled kernel: in place, returns the rescale count."""
    n = len(f)
    if len(psi) != n:
        raise ValueError("f and psi must have the same length")
    if n < 3:
        return 0
    fl = (1.0 - h2 * np.asarray(f) / 12.0).tolist()
    out = [float(psi[0]), float(psi[1])] + [0.0] * (n - 2)
    rescaled = 0
    a_prev, a_cur = fl[0], fl[1]
    p_prev, p_cur = out[0], out[1]
    for i in range(1, n - 1):
        a_next = fl[i + 1]
        p_next = ((12.0 - 10.0 * a_cur) * p_cur - a_prev * p_prev) / a_next
        out[i + 1] = p_next
        if abs(p_next) > limit:
            scale = 1.0 / abs(p_next)
            out[: i + 2] = [v * scale for v in out[: i + 2]]
            p_cur, p_next = out[i], out[i + 1]
            rescaled += 1
        a_prev, a_cur = a_cur, a_next
        p_prev, p_cur = p_cur, p_next
    psi[:] = out
    return rescaled
