"""Monte Carlo estimate of the expected-root density of f0 + f1 e^x at x = 0:
P(root in [-eps, eps]) / (2 eps) with eps = 0.01."""
import numpy as np

SAMPLES = 1_000_000
EPS = 0.01

rng = np.random.default_rng(20240611)
f0 = rng.standard_normal(SAMPLES)
f1 = rng.standard_normal(SAMPLES)
ratio = -f0 / f1
hit = np.zeros(SAMPLES, dtype=bool)
pos = ratio > 0
hit[pos] = np.abs(np.log(ratio[pos])) <= EPS
p = hit.mean()
se = np.sqrt(p * (1 - p) / SAMPLES)
print(f"density {p / (2 * EPS):.6f} stderr {se / (2 * EPS):.6f}")
