"""Per-trial hot loops, each as a numba kernel plus a pure-numpy twin.

All kernels take a block of trials flattened CSR-style: ``counts[t]`` points
belong to trial ``t`` and sit contiguously in the point arrays. Random draws
are made by the caller, so both variants see identical inputs.
"""

import numpy as np

from .._accel import njit, pick


def _offsets(counts):
    off = np.zeros(counts.shape[0] + 1, dtype=np.int64)
    np.cumsum(counts, out=off[1:])
    return off


# -- interference from an annulus --------------------------------------------


def _annulus_interference_loop(counts, u, fading, g2, R2, half_eta, power):
    """Sum of ``power * H * r**-eta`` over points uniform in the annulus ``[g_t, R]``.

    ``u`` are uniforms mapped to ``r**2 = g2 + u (R2 - g2)``; ``half_eta = eta / 2``.
    """
    n = counts.shape[0]
    out = np.zeros(n)
    k = 0
    for t in range(n):
        lo = g2[t]
        span = R2 - lo
        acc = 0.0
        for _ in range(counts[t]):
            r2 = lo + u[k] * span
            acc += fading[k] * r2 ** (-half_eta)
            k += 1
        out[t] = power * acc
    return out


_annulus_interference_jit = njit(_annulus_interference_loop)


def _annulus_interference_numpy(counts, u, fading, g2, R2, half_eta, power):
    n = counts.shape[0]
    owner = np.repeat(np.arange(n), counts)
    lo = g2[owner]
    r2 = lo + u * (R2 - lo)
    return power * np.bincount(owner, weights=fading * r2 ** (-half_eta), minlength=n)


annulus_interference = pick(_annulus_interference_jit, _annulus_interference_numpy)


# -- cluster extraction from a realized field --------------------------------


def _field_cluster_loop(counts, r2, fading, act, p_active, K, half_eta):
    """Split each trial's field into its K nearest points and the rest.

    Returns ``(near_r2, interference)``: the K smallest squared distances per
    trial (``inf``-padded when the field holds fewer than K points) and the
    unit-power faded interference of all remaining points. With ``p_active < 1``
    a remaining point interferes only if its activity uniform is below it.
    """
    n = counts.shape[0]
    near = np.full((n, K), np.inf)
    interf = np.zeros(n)
    thin = p_active < 1.0
    k0 = 0
    for t in range(n):
        c = counts[t]
        # K smallest squared distances by insertion
        for j in range(k0, k0 + c):
            x = r2[j]
            if x < near[t, K - 1]:
                i = K - 1
                while i > 0 and near[t, i - 1] > x:
                    near[t, i] = near[t, i - 1]
                    i -= 1
                near[t, i] = x
        cut = near[t, K - 1]
        acc = 0.0
        for j in range(k0, k0 + c):
            if r2[j] > cut:
                if thin and act[j] >= p_active:
                    continue
                acc += fading[j] * r2[j] ** (-half_eta)
        interf[t] = acc
        k0 += c
    return near, interf


_field_cluster_jit = njit(_field_cluster_loop)


def _field_cluster_numpy(counts, r2, fading, act, p_active, K, half_eta):
    n = counts.shape[0]
    owner = np.repeat(np.arange(n), counts)
    order = np.lexsort((r2, owner))
    off = _offsets(counts)
    rank = np.arange(r2.shape[0]) - off[owner[order]]
    sorted_r2 = r2[order]
    near = np.full((n, K), np.inf)
    in_cluster = rank < K
    near[owner[order][in_cluster], rank[in_cluster]] = sorted_r2[in_cluster]
    keep = ~in_cluster
    if p_active < 1.0:
        keep &= act[order] < p_active
    contrib = np.where(keep, fading[order] * sorted_r2 ** (-half_eta), 0.0)
    interf = np.bincount(owner[order], weights=contrib, minlength=n)
    return near, interf


field_cluster = pick(_field_cluster_jit, _field_cluster_numpy)


# -- candidate users of the typical user's cluster ---------------------------


def _count_candidates_loop(tx_counts, tx_xy, u_counts, u_xy, K, extra):
    """Number of users (typical user at the origin included) sharing the origin's K-nearest TX set.

    Users farther than ``d_K + extra`` from the origin are skipped.
    """
    n = tx_counts.shape[0]
    ncand = np.ones(n, dtype=np.int64)
    idx = np.empty(K, dtype=np.int64)
    dist = np.empty(K)
    a = 0
    b = 0
    for t in range(n):
        c = tx_counts[t]
        for i in range(K):
            dist[i] = np.inf
            idx[i] = -1
        for j in range(a, a + c):
            x = tx_xy[j, 0] * tx_xy[j, 0] + tx_xy[j, 1] * tx_xy[j, 1]
            if x < dist[K - 1]:
                i = K - 1
                while i > 0 and dist[i - 1] > x:
                    dist[i] = dist[i - 1]
                    idx[i] = idx[i - 1]
                    i -= 1
                dist[i] = x
                idx[i] = j
        if idx[K - 1] < 0:
            a += c
            b += u_counts[t]
            continue
        reach = np.sqrt(dist[K - 1]) + extra
        reach2 = reach * reach
        for m in range(b, b + u_counts[t]):
            yx = u_xy[m, 0]
            yy = u_xy[m, 1]
            if yx * yx + yy * yy > reach2:
                continue
            worst = 0.0
            for i in range(K):
                dx = tx_xy[idx[i], 0] - yx
                dy = tx_xy[idx[i], 1] - yy
                dd = dx * dx + dy * dy
                if dd > worst:
                    worst = dd
            same = True
            for j in range(a, a + c):
                member = False
                for i in range(K):
                    if idx[i] == j:
                        member = True
                if member:
                    continue
                dx = tx_xy[j, 0] - yx
                dy = tx_xy[j, 1] - yy
                if dx * dx + dy * dy < worst:
                    same = False
                    break
            if same:
                ncand[t] += 1
        a += c
        b += u_counts[t]
    return ncand


_count_candidates_jit = njit(_count_candidates_loop)


def _count_candidates_numpy(tx_counts, tx_xy, u_counts, u_xy, K, extra):
    n = tx_counts.shape[0]
    ncand = np.ones(n, dtype=np.int64)
    toff = _offsets(tx_counts)
    uoff = _offsets(u_counts)
    for t in range(n):
        tx = tx_xy[toff[t] : toff[t + 1]]
        if tx.shape[0] < K:
            continue
        d0 = np.einsum("ij,ij->i", tx, tx)
        members = np.argpartition(d0, K - 1)[:K]
        reach = np.sqrt(d0[members].max()) + extra
        users = u_xy[uoff[t] : uoff[t + 1]]
        users = users[np.einsum("ij,ij->i", users, users) <= reach * reach]
        if users.shape[0] == 0:
            continue
        diff = users[:, None, :] - tx[None, :, :]
        dd = np.einsum("ijk,ijk->ij", diff, diff)
        worst = dd[:, members].max(axis=1)
        dd[:, members] = np.inf
        ncand[t] += int(np.count_nonzero(dd.min(axis=1) > worst))
    return ncand


count_candidates = pick(_count_candidates_jit, _count_candidates_numpy)
