"""Pure-Python backward/forward sweep; same contract as the compiled kernel."""
from __future__ import annotations

import numpy as np


def sweep(parent, zr, zx, p, q, tol, max_iter):
    n = len(parent)
    parent = [int(x) for x in parent]
    z = [complex(a, b) for a, b in zip(zr, zx)]
    y = [0j] + [1.0 / zk for zk in z[1:]]
    s = [complex(a, b) for a, b in zip(p, q)]
    v = [1.0 + 0j] * n
    ib = [0j] * n
    it = 0
    worst = 0.0
    while it < max_iter:
        it += 1
        j = [(sk / vk).conjugate() for sk, vk in zip(s, v)]
        for k in range(n - 1, 0, -1):
            j[parent[k]] += j[k]
        for k in range(1, n):
            v[k] = v[parent[k]] - z[k] * j[k]
        drawn = [0j] * n
        for k in range(1, n):
            m = parent[k]
            ib[k] = y[k] * (v[m] - v[k])
            drawn[k] += ib[k]
            drawn[m] -= ib[k]
        worst = 0.0
        for k in range(1, n):
            err = abs(v[k] * drawn[k].conjugate() - s[k])
            if err > worst:
                worst = err
        if worst <= tol:
            break
    v_arr = np.array(v)
    i_arr = np.array(ib)
    return v_arr.real.copy(), v_arr.imag.copy(), i_arr.real.copy(), i_arr.imag.copy(), it, worst
