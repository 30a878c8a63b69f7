"""Pure-NumPy fallback for the compiled kernels.

Same signatures and semantics as ``sigdist._kernels``. The KDE kernel chunks
the query axis so the pairwise squared-distance block stays within a fixed
memory budget.
"""

import numpy as np
from scipy.spatial.distance import cdist
from scipy.special import logsumexp

# upper bound on the number of pairwise entries materialized at once
_BLOCK_CELLS = 4_000_000


def kde_log_density(queries, train, inv_bandwidths, log_norm):
    queries = np.asarray(queries, dtype=np.float64)
    train = np.asarray(train, dtype=np.float64)
    scaled_q = np.ascontiguousarray(queries * inv_bandwidths)
    scaled_t = np.ascontiguousarray(train * inv_bandwidths)
    n = scaled_q.shape[0]
    m = scaled_t.shape[0]
    out = np.empty(n, dtype=np.float64)
    step = max(1, _BLOCK_CELLS // max(m, 1))
    for start in range(0, n, step):
        block = scaled_q[start:start + step]
        sq_dist = cdist(block, scaled_t, "sqeuclidean")
        out[start:start + step] = logsumexp(-0.5 * sq_dist, axis=1)
    return out + log_norm


def mixture_log_density(queries, means, chol_inv, log_weight_norms):
    queries = np.asarray(queries, dtype=np.float64)
    k = means.shape[0]
    per_component = np.empty((k, queries.shape[0]), dtype=np.float64)
    for j in range(k):
        if log_weight_norms[j] == -np.inf:
            per_component[j] = -np.inf
            continue
        centered = queries - means[j]
        z = centered @ chol_inv[j].T
        per_component[j] = log_weight_norms[j] - 0.5 * np.einsum("ij,ij->i", z, z)
    return logsumexp(per_component, axis=0)
