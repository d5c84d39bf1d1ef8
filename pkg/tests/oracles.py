"""Independent reference implementations used by the tests.

Plain Python loops on purpose: none of these share code paths with the
vectorised package implementations they check.
"""

import itertools
import math

import numpy as np


def silhouette_reference(data, labels):
    arr = np.asarray(data, dtype=float).reshape(len(labels), -1)
    pts = [tuple(float(v) for v in row) for row in arr]
    labels = list(labels)
    clusters = sorted(set(labels))
    scores = []
    for i, p in enumerate(pts):
        own = [j for j in range(len(pts)) if labels[j] == labels[i] and j != i]
        if not own:
            scores.append(0.0)
            continue
        a = sum(math.dist(p, pts[j]) for j in own) / len(own)
        b = math.inf
        for c in clusters:
            if c == labels[i]:
                continue
            members = [j for j in range(len(pts)) if labels[j] == c]
            b = min(b, sum(math.dist(p, pts[j]) for j in members) / len(members))
        denom = max(a, b)
        scores.append(0.0 if denom == 0 else (b - a) / denom)
    return sum(scores) / len(scores), scores


def wss(data, labels):
    """Within-cluster sum of squares with centers at the cluster means."""
    total = 0.0
    for c in set(labels):
        rows = [data[i] for i in range(len(data)) if labels[i] == c]
        dim = len(rows[0])
        mean = [sum(r[d] for r in rows) / len(rows) for d in range(dim)]
        total += sum(sum((r[d] - mean[d]) ** 2 for d in range(dim)) for r in rows)
    return total


def brute_force_two_means(data):
    """Optimal 2-cluster WSS and a minimising labelling by full enumeration."""
    data = [list(map(float, r)) for r in data]
    n = len(data)
    best, best_labels = math.inf, None
    # fix point 0 in cluster 0 to skip mirrored labellings
    for bits in itertools.product((0, 1), repeat=n - 1):
        labels = (0,) + bits
        if 1 not in labels:
            continue
        w = wss(data, labels)
        if w < best:
            best, best_labels = w, labels
    return best, best_labels


def symmetric_eigenvalues_closed_form(c):
    """Eigenvalues of a symmetric 2x2 or 3x3 matrix, descending."""
    c = [[float(v) for v in row] for row in c]
    if len(c) == 2:
        (a, b), (_, d) = c
        mid = (a + d) / 2
        rad = math.sqrt(((a - d) / 2) ** 2 + b * b)
        return [mid + rad, mid - rad]
    # characteristic polynomial  -l^3 + tr l^2 - m l + det = 0, trigonometric roots
    a = c
    p1 = a[0][1] ** 2 + a[0][2] ** 2 + a[1][2] ** 2
    tr = a[0][0] + a[1][1] + a[2][2]
    if p1 == 0:
        return sorted([a[0][0], a[1][1], a[2][2]], reverse=True)
    q = tr / 3
    p2 = (a[0][0] - q) ** 2 + (a[1][1] - q) ** 2 + (a[2][2] - q) ** 2 + 2 * p1
    p = math.sqrt(p2 / 6)
    b = [[(a[i][j] - (q if i == j else 0)) / p for j in range(3)] for i in range(3)]
    det_b = (b[0][0] * (b[1][1] * b[2][2] - b[1][2] * b[2][1])
             - b[0][1] * (b[1][0] * b[2][2] - b[1][2] * b[2][0])
             + b[0][2] * (b[1][0] * b[2][1] - b[1][1] * b[2][0]))
    r = max(-1.0, min(1.0, det_b / 2))
    phi = math.acos(r) / 3
    e1 = q + 2 * p * math.cos(phi)
    e3 = q + 2 * p * math.cos(phi + 2 * math.pi / 3)
    e2 = 3 * q - e1 - e3
    return sorted([e1, e2, e3], reverse=True)


def ari_pair_counting(a, b):
    """ARI by enumerating every pair of items."""
    n = len(a)
    same_both = same_a = same_b = 0
    for i in range(n):
        for j in range(i + 1, n):
            sa, sb = a[i] == a[j], b[i] == b[j]
            same_a += sa
            same_b += sb
            same_both += sa and sb
    pairs = n * (n - 1) / 2
    expected = same_a * same_b / pairs
    maximum = (same_a + same_b) / 2
    if maximum == expected:
        return 1.0 if same_both == same_a == same_b else 0.0
    return (same_both - expected) / (maximum - expected)


def som_replay(data, grid_rows, grid_cols, epochs, lr_start, lr_end, sigma_start, sigma_end, seed):
    """Scalar replay of the sequential SOM update.

    The random draws (initial rows, per-epoch orders) come from the same
    PCG64 stream; all arithmetic is plain Python floats.
    """
    data = [[float(v) for v in row] for row in np.asarray(data)]
    n, dim = len(data), len(data[0])
    nodes = grid_rows * grid_cols
    rng = np.random.Generator(np.random.PCG64(seed))
    init = rng.integers(0, n, size=nodes)
    w = [list(data[int(i)]) for i in init]
    coords = [(k // grid_cols, k % grid_cols) for k in range(nodes)]
    total = epochs * n
    step = 0
    for _ in range(epochs):
        for i in rng.permutation(n):
            x = data[int(i)]
            best, best_d = 0, math.inf
            for k in range(nodes):
                d = 0.0
                for j in range(dim):
                    d += (w[k][j] - x[j]) ** 2
                if d < best_d:
                    best, best_d = k, d
            t = step / total
            alpha = lr_start * (lr_end / lr_start) ** t
            sigma = sigma_start * (sigma_end / sigma_start) ** t
            for k in range(nodes):
                g = float((coords[k][0] - coords[best][0]) ** 2 + (coords[k][1] - coords[best][1]) ** 2)
                coef = alpha * math.exp(-g / (2.0 * sigma * sigma))
                for j in range(dim):
                    w[k][j] = w[k][j] + coef * (x[j] - w[k][j])
            step += 1
    return np.array(w), np.array([data[int(i)] for i in init])


def single_node_recurrence(data, epochs, lr_start, lr_end, seed):
    """1x1 map: w <- w + alpha(t) * (x_t - w), the neighbourhood is always 1."""
    data = [[float(v) for v in row] for row in np.asarray(data)]
    n = len(data)
    rng = np.random.Generator(np.random.PCG64(seed))
    w = list(data[int(rng.integers(0, n, size=1)[0])])
    step, total = 0, epochs * n
    for _ in range(epochs):
        for i in rng.permutation(n):
            alpha = lr_start * (lr_end / lr_start) ** (step / total)
            coef = alpha * 1.0
            w = [wj + coef * (xj - wj) for wj, xj in zip(w, data[int(i)])]
            step += 1
    return np.array(w)
