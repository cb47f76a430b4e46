"""Python replica of the counter-based normal generator, for oracle scripts."""
import math

M = (1 << 64) - 1


def _mix(z):
    z = (z + 0x9E3779B97F4A7C15) & M
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & M
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & M
    return z ^ (z >> 31)


def bits(seed, sample, stream, index, lane=0):
    h = _mix(seed ^ 0x9E3779B97F4A7C15)
    h = _mix(h ^ sample)
    h = _mix(h ^ ((stream * 0xD1B54A32D192ED03) & M))
    h = _mix(h ^ index)
    return _mix(h ^ ((lane + 0x632BE59BD9B4E019) & M))


def uniform(seed, sample, stream, index, lane=0):
    return ((bits(seed, sample, stream, index, lane) >> 11) + 1.0) * 2.0**-53


def normal(seed, sample, stream, index):
    u1 = uniform(seed, sample, stream, index, 0)
    u2 = uniform(seed, sample, stream, index, 1)
    return math.sqrt(-2.0 * math.log(u1)) * math.cos(2.0 * math.pi * u2)


def coefficients(seed, sample, term_counts):
    return [[normal(seed, sample, i, a) for a in range(m)] for i, m in enumerate(term_counts)]
