"""Seeded fixture builders shared by the test modules."""
import numpy as np

from masscut.measure import Measure
from masscut.separated import Anchors


def rng(seed):
    return np.random.default_rng(seed)


def blob(r, center, n, spread=1.0):
    center = np.asarray(center, dtype=float)
    return Measure(center + spread * r.normal(size=(n, len(center))))


def triangle_clouds(seed, n=300, spread=0.5):
    """Three planar clouds around the corners of a triangle."""
    r = rng(seed)
    return [blob(r, c, n, spread) for c in ((0, 0), (3, 0), (1.5, 2.5))]


def random_clouds(seed, k, n, d=2):
    r = rng(seed)
    return [blob(r, 2 * r.normal(size=d), n) for _ in range(k)]


def mirror_pairs(seed, k, n=20, axis=1):
    """k clouds, each symmetric under reflection of one coordinate."""
    r = rng(seed)
    flip = np.ones(2)
    flip[axis] = -1
    out = []
    for _ in range(k):
        p = r.normal(size=(n, 2))
        out.append(Measure(np.vstack([p, p * flip])))
    return out


def separated_pair(seed, n=1000):
    """Two well-separated planar clouds; the second sits four units away in a random direction."""
    r = rng(seed)
    c = r.normal(size=2)
    c /= np.linalg.norm(c)
    return [Measure(0.5 * r.normal(size=(n, 2))), Measure(0.5 * r.normal(size=(n, 2)) + 4 * c)]


def spread_directions(n, d, r):
    """n unit vectors pushed apart by repulsion."""
    if n == 1:
        return np.eye(d)[:1]
    if d == 2:
        th = 2 * np.pi * np.arange(n) / n
        return np.column_stack([np.cos(th), np.sin(th)])
    x = r.normal(size=(n, d))
    x /= np.linalg.norm(x, axis=1)[:, None]
    for _ in range(500):
        diff = x[:, None, :] - x[None, :, :]
        dist = np.linalg.norm(diff, axis=2) + np.eye(n)
        x = x + 0.05 * (diff / dist[:, :, None] ** 3).sum(1)
        x /= np.linalg.norm(x, axis=1)[:, None]
    return x


def nicely_separated(seed, n, d, pts=1000):
    r = rng(seed)
    return [Measure(5 * e + 0.1 * r.normal(size=(pts, d))) for e in spread_directions(n, d, r)]


def concentrated(n, seed, spread=0.06, pts=200):
    """Clusters at 1.5 e_i with anchors p = 0, p_i = e_i, q_i = 2.5 e_i."""
    r = rng(seed)
    th = 2 * np.pi * np.arange(n) / n + r.uniform(0, 0.3)
    e = np.column_stack([np.cos(th), np.sin(th)])
    ms = [Measure(1.5 * v + spread * r.normal(size=(pts, 2))) for v in e]
    return ms, Anchors((0.0, 0.0), tuple(map(tuple, e)), tuple(map(tuple, 2.5 * e)))


def rigid(seed, d):
    """A random rotation (possibly a reflection) and translation."""
    r = rng(seed)
    q, _ = np.linalg.qr(r.normal(size=(d, d)))
    return q, r.normal(size=d) * 3


def moved(measures, q, t):
    return [Measure(m.points @ q.T + t, m.weights, m.name) for m in measures]
