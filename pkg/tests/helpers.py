"""Shared deterministic random generators for the test suite."""

from __future__ import annotations

import random
from fractions import Fraction

import numpy as np

from bifree.cumulant import TableMomentFunctional
from bifree.derivation import enumerate_words
from bifree.ncalg import (
    AlgebraMode,
    Letter,
    NCPolynomial,
    Word,
    lsym,
    lvar,
    normal_form,
    rsym,
    rvar,
)


def var_letters(mode: AlgebraMode) -> list[Letter]:
    return [lvar(i + 1) for i in range(mode.left_arity)] + [
        rvar(j + 1) for j in range(mode.right_arity)
    ]


def mixed_letters(mode: AlgebraMode, n_syms: int = 2) -> list[Letter]:
    return (
        var_letters(mode)
        + [lsym(i + 1) for i in range(n_syms)]
        + [rsym(i + 1) for i in range(n_syms)]
    )


def rand_frac(rng: random.Random, span: int = 4) -> Fraction:
    num = rng.randint(-span, span)
    return Fraction(num if num else 1, rng.randint(1, span))


def rand_word(rng: random.Random, letters, max_len: int, mode: AlgebraMode) -> Word:
    w = tuple(rng.choice(letters) for _ in range(rng.randint(0, max_len)))
    return normal_form(w, mode)


def rand_poly(
    rng: random.Random,
    mode: AlgebraMode,
    letters=None,
    max_terms: int = 4,
    max_len: int = 4,
) -> NCPolynomial:
    letters = letters or var_letters(mode)
    terms = {}
    for _ in range(rng.randint(1, max_terms)):
        terms[rand_word(rng, letters, max_len, mode)] = rand_frac(rng)
    return NCPolynomial(terms)


def rand_functional(
    rng: random.Random, mode: AlgebraMode, degree_bound: int
) -> TableMomentFunctional:
    """A completely random moment table on canonical words up to the bound."""
    table = {}
    for word in enumerate_words(mode, degree_bound):
        table[word] = rand_frac(rng) if word else Fraction(1)
    return TableMomentFunctional(mode, table, degree_bound)


def rand_chi(rng: random.Random, k: int) -> tuple[str, ...]:
    return tuple(rng.choice("lr") for _ in range(k))


def rand_psd(rng: np.random.Generator, k: int, rank: int | None = None) -> np.ndarray:
    r = rank if rank is not None else k
    b = rng.normal(size=(k, r))
    return b @ b.T


def rand_psd_spectrum(
    rng: np.random.Generator, k: int, rank: int, lo: float = 0.5, hi: float = 3.0
) -> np.ndarray:
    """Rank-``rank`` PSD matrix whose nonzero eigenvalues stay in [lo, hi]."""
    q, _ = np.linalg.qr(rng.normal(size=(k, k)))
    eigs = np.zeros(k)
    eigs[:rank] = rng.uniform(lo, hi, size=rank)
    return (q * eigs) @ q.T


def all_set_partitions(k: int):
    """Every set partition of {1..k} via unrestricted growth strings."""

    def rec(i: int, assignment: list[int], nblocks: int):
        if i == k:
            blocks: list[list[int]] = [[] for _ in range(nblocks)]
            for pos, b in enumerate(assignment):
                blocks[b].append(pos + 1)
            yield tuple(tuple(b) for b in blocks)
            return
        for b in range(nblocks + 1):
            assignment.append(b)
            yield from rec(i + 1, assignment, max(nblocks, b + 1))
            assignment.pop()

    yield from rec(0, [], 0)
