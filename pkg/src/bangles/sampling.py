"""Seeded random generators for bangles, matrices, and witnesses.

Everything takes a random.Random instance so runs are reproducible; the CLI
`random` subcommand and all randomized tests go through here.
"""

import random

from gmpy2 import mpq

from .bangle import Bangle, Witness
from .matrix import Mat, is_nonsingular


def random_scalar(rng, field, span=3):
    if field.kind == "Q":
        return mpq(rng.randint(-span, span))
    if field.kind == "Qi":
        return (mpq(rng.randint(-span, span)), mpq(rng.randint(-span, span)))
    if field.kind == "GF":
        return rng.randrange(field.p)
    return complex(rng.randint(-span, span), rng.randint(-span, span))


def random_mat(rng, field, rows, cols, span=3, density=1.0):
    m = Mat.zeros(field, rows, cols)
    for i in range(rows):
        for j in range(cols):
            if density >= 1.0 or rng.random() < density:
                m.data[i][j] = random_scalar(rng, field, span)
    return m


def random_nonsingular(rng, field, n, span=3, tries=60):
    if n == 0:
        return Mat.zeros(field, 0, 0)
    for _ in range(tries):
        m = random_mat(rng, field, n, n, span)
        if is_nonsingular(m):
            return m
    # fall back to a guaranteed-invertible unit triangular matrix
    m = Mat.identity(field, n)
    for i in range(n):
        for j in range(i + 1, n):
            m.data[i][j] = random_scalar(rng, field, span)
    return m


def random_bangle(rng, field, t, k0, widths, span=3, density=1.0):
    n = widths[k0]
    strips = [random_mat(rng, field, n, w, span, density) for w in widths]
    return Bangle(field, strips, k0)


def random_bangle_shape(rng, t_max=4, box_max=6, total_max=14):
    t = rng.randint(1, t_max)
    k0 = rng.randrange(t)
    widths = [0] * t
    widths[k0] = rng.randint(0, box_max)
    budget = total_max - widths[k0]
    for i in range(t):
        if i == k0:
            continue
        w = rng.randint(0, min(4, max(budget, 0)))
        widths[i] = w
        budget -= w
    return t, k0, tuple(widths)


def random_witness(rng, field, mode, partition, boxed, span=2):
    """A random nonsingular upper block-triangular witness."""
    total = sum(partition)
    m = Mat.zeros(field, total, total)
    offs = []
    c = 0
    for w in partition:
        offs.append(c)
        c += w
    for i, w in enumerate(partition):
        blk = random_nonsingular(rng, field, w, span)
        for a in range(w):
            for b in range(w):
                m.data[offs[i] + a][offs[i] + b] = blk.data[a][b]
        for j in range(i + 1, len(partition)):
            blk = random_mat(rng, field, w, partition[j], span)
            for a in range(w):
                for b in range(partition[j]):
                    m.data[offs[i] + a][offs[j] + b] = blk.data[a][b]
    return Witness(mode, partition, boxed, m, check=False)


def rng_from_seed(seed):
    return random.Random(seed)
