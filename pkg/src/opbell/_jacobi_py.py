"""Pure-Python cyclic Jacobi eigensolver.

Same algorithm and floating-point operation order as the compiled kernel in
``_jacobi.pyx``; used when the extension is not built or when
``OPBELL_PURE_PYTHON=1`` is set.
"""
import math

import numpy as np


def jacobi_eigh(a_in, rel_tol=1e-14, max_sweeps=100):
    """Return ``(eigenvalues, eigenvectors, sweeps, converged)``, unsorted."""
    a = np.array(a_in, dtype=np.float64).tolist()
    n = len(a)
    v = [[1.0 if i == j else 0.0 for j in range(n)] for i in range(n)]

    norm_f = 0.0
    for p in range(n):
        for q in range(n):
            norm_f += a[p][q] * a[p][q]
    norm_f = math.sqrt(norm_f)

    sweep = 0
    converged = False
    while True:
        off = 0.0
        for p in range(n):
            for q in range(p + 1, n):
                off += 2.0 * a[p][q] * a[p][q]
        off = math.sqrt(off)
        if off <= rel_tol * norm_f:
            converged = True
            break
        if sweep >= max_sweeps:
            break
        for p in range(n - 1):
            ap = a[p]
            for q in range(p + 1, n):
                aq = a[q]
                apq = ap[q]
                if apq == 0.0:
                    continue
                app = ap[p]
                aqq = aq[q]
                g = 100.0 * abs(apq)
                if sweep > 3 and abs(app) + g == abs(app) and abs(aqq) + g == abs(aqq):
                    ap[q] = 0.0
                    aq[p] = 0.0
                    continue
                theta = (aqq - app) / (2.0 * apq)
                if abs(theta) > 1e150:
                    t = 0.5 / theta
                else:
                    t = 1.0 / (abs(theta) + math.sqrt(theta * theta + 1.0))
                    if theta < 0.0:
                        t = -t
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                for k in range(n):
                    if k == p or k == q:
                        continue
                    ak = a[k]
                    akp = ak[p]
                    akq = ak[q]
                    ak[p] = c * akp - s * akq
                    ap[k] = ak[p]
                    ak[q] = s * akp + c * akq
                    aq[k] = ak[q]
                ap[p] = app - t * apq
                aq[q] = aqq + t * apq
                ap[q] = 0.0
                aq[p] = 0.0
                for vk in v:
                    vkp = vk[p]
                    vkq = vk[q]
                    vk[p] = c * vkp - s * vkq
                    vk[q] = s * vkp + c * vkq
        sweep += 1

    w = np.array([a[p][p] for p in range(n)], dtype=np.float64)
    return w, np.array(v, dtype=np.float64).reshape(n, n), sweep, converged
