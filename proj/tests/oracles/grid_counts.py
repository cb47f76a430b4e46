"""Brute-force fine-grid root counts for seed-fixed sampled systems.

1D: sign changes of the normalized residual on 10^7 uniform points.
2D: cells of a 4096 x 4096 grid where both residuals change sign, grouped
into 8-connected components; each component centroid is polished by
Newton and distinct converged roots are counted.
Residuals are evaluated in long double with a max-shift, independently of
the library code.
"""
import numpy as np
from scipy import ndimage

import counter_rng

LD = np.longdouble


def residual(exps, c2, f, pts):
    """pts: (N, n). Returns sum f_a alpha_a e^{a.x} / ||V(x)||, long double."""
    exps = np.asarray(exps, dtype=LD)
    logc = 0.5 * np.log(np.asarray(c2, dtype=LD))
    z = pts.astype(LD) @ exps.T + logc  # log(alpha_a e^{a.x})
    shift = z.max(axis=1, keepdims=True)
    e = np.exp(z - shift)
    num = e @ np.asarray(f, dtype=LD)
    return num / np.sqrt((e * e).sum(axis=1))


SPACE_1D = ([[-2], [0], [1], [3], [4]], [0.5, 1.0, 2.0, 1.0, 0.25])
SPACE_2D = ([[0, 0], [0, 1], [1, 0], [1, 2], [2, 1]], [1.0, 2.0, 2.0, 0.5, 0.5])  # lexicographic order
KOSTLAN_2D = ([[0, 0], [0, 1], [1, 0]], [1.0, 1.0, 1.0])  # lexicographic order


def count_1d(space, seed, sample, lo, hi, points=10_000_000):
    exps, c2 = space
    f = counter_rng.coefficients(seed, sample, [len(c2)])[0]
    total = 0
    chunk = 1_000_000
    prev = None
    xs_all = np.linspace(lo, hi, points)
    for start in range(0, points, chunk):
        xs = xs_all[start:start + chunk].reshape(-1, 1)
        v = residual(exps, c2, f, xs)
        s = np.sign(v)
        if prev is not None:
            total += int(prev != s[0])
        total += int(np.count_nonzero(s[1:] != s[:-1]))
        prev = s[-1]
    return total


def sign_profile(space, seed, sample, lo, hi, points=1_000_000):
    exps, c2 = space
    f = counter_rng.coefficients(seed, sample, [len(c2)])[0]
    xs = np.linspace(lo, hi, points).reshape(-1, 1)
    v = residual(exps, c2, f, xs)
    return int(np.count_nonzero(v > 0)), int(np.count_nonzero(np.sign(v[1:]) != np.sign(v[:-1])))


def count_2d(spaces, seed, sample, lo, hi, cells=4096):
    fs = counter_rng.coefficients(seed, sample, [len(s[1]) for s in spaces])
    g = np.linspace(lo, hi, cells + 1)
    changes = []
    for (exps, c2), f in zip(spaces, fs):
        v = np.empty((cells + 1, cells + 1), dtype=LD)
        for i in range(0, cells + 1, 256):
            rows = g[i:i + 256]
            xx, yy = np.meshgrid(rows, g, indexing="ij")
            pts = np.stack([xx.ravel(), yy.ravel()], axis=1)
            v[i:i + len(rows)] = residual(exps, c2, f, pts).reshape(len(rows), cells + 1)
        corners = np.stack([v[:-1, :-1], v[1:, :-1], v[:-1, 1:], v[1:, 1:]])
        changes.append((corners.min(axis=0) <= 0) & (corners.max(axis=0) >= 0))
    both = changes[0] & changes[1]
    labels, components = ndimage.label(both, structure=np.ones((3, 3)))
    # Shallow crossings can split into several components; polish each
    # centroid with Newton and count distinct converged roots instead.
    step = (hi - lo) / cells
    roots = []
    for k in range(1, components + 1):
        i, j = np.argwhere(labels == k).mean(axis=0)
        p = polish(spaces, fs, np.array([lo + (i + 0.5) * step, lo + (j + 0.5) * step], dtype=LD))
        if p is None or not (lo <= p[0] < hi and lo <= p[1] < hi):
            continue
        if all(np.max(np.abs(p - q)) > 1e-6 for q in roots):
            roots.append(p)
    return len(roots)


def polish(spaces, fs, p, iters=60, h=LD(1e-7)):
    def F(q):
        return np.array([residual(e, c, f, q.reshape(1, -1))[0] for (e, c), f in zip(spaces, fs)])
    for _ in range(iters):
        v = F(p)
        jac = np.empty((2, 2), dtype=LD)
        for a in range(2):
            d = np.zeros(2, dtype=LD)
            d[a] = h
            jac[:, a] = (F(p + d) - F(p - d)) / (2 * h)
        step = np.linalg.solve(jac.astype(float), v.astype(float)).astype(LD)
        p = p - step
        if np.max(np.abs(step)) < 1e-13:
            return p if np.max(np.abs(F(p))) < 1e-12 else None
    return None


def kostlan_analytic(seed, sample, lo, hi):
    f, g = counter_rng.coefficients(seed, sample, [3, 3])
    # Terms sorted as (0,0), (0,1), (1,0): f0 + f1 Y + f2 X.
    a = np.array([[f[2], f[1]], [g[2], g[1]]])
    b = -np.array([f[0], g[0]])
    X, Y = np.linalg.solve(a, b)
    if X <= 0 or Y <= 0:
        return 0
    x, y = np.log(X), np.log(Y)
    return int(lo <= x < hi and lo <= y < hi)


if __name__ == "__main__":
    print("1D counts, seed 2024, [-10,10]:", [count_1d(SPACE_1D, 2024, k, -10, 10) for k in range(5)])
    print("1D sign profile, seed 2024 sample 0, [-5,5]:", sign_profile(SPACE_1D, 2024, 0, -5, 5))
    print("2D Kostlan grid, seed 11, [-6,6]^2:", [count_2d([KOSTLAN_2D, KOSTLAN_2D], 11, k, -6, 6) for k in range(5)])
    print("2D Kostlan analytic:", [kostlan_analytic(11, k, -6, 6) for k in range(5)])
    print("2D space grid, seed 5, [-4,4]^2:", [count_2d([SPACE_2D, SPACE_2D], 5, k, -4, 4) for k in range(4)])
