"""Symbolic difference quotients, conjugate-variable checks, and adjoint recursion.

Four quotients act on noncommutative polynomials.  On a word, each occurrence
of the target variable splits the word into a prefix A and suffix B; writing
``lefts``/``rights`` for the side subwords (relative order kept):

* left:           (A · rights(B)) ⊗ lefts(B)
* right:          (A · lefts(B)) ⊗ rights(B)
* flipped left:   lefts(A) ⊗ (rights(A) · B)
* flipped right:  rights(A) ⊗ (lefts(A) · B)

These are the compositions of the side-splitting homomorphisms and the
collapse map with the free derivation; in bipartite mode the result is
computed on the canonical representative and re-normalized (the maps descend
to the commutation quotient, which the test suite verifies).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Iterator

from .cumulant import MomentFunctional
from .ncalg import (
    LEFT,
    RIGHT,
    STRAIGHT,
    VAR,
    AlgebraMode,
    Letter,
    NCPolynomial,
    TensorPoly,
    Word,
    mul,
    normal_form,
    normalize_poly,
    star,
    tensor_cw_star,
    tensor_mul,
    tensor_of,
    tensor_swap,
)


@dataclass(frozen=True)
class QuotientKind:
    """Which quotient to apply: side, target variable index, flipped or not."""

    side: str
    index: int
    flipped: bool = False

    def __post_init__(self) -> None:
        if self.side not in (LEFT, RIGHT):
            raise ValueError(f"side must be 'l' or 'r', got {self.side!r}")
        if self.index < 1:
            raise ValueError("target index must be positive")

    @property
    def target(self) -> Letter:
        return Letter(self.side, self.index, VAR)


def _lefts(word: Word) -> Word:
    return tuple(l for l in word if l.side == LEFT)


def _rights(word: Word) -> Word:
    return tuple(l for l in word if l.side == RIGHT)


def free_dq(p: NCPolynomial, letter: Letter, mode: AlgebraMode) -> TensorPoly:
    """Free difference quotient: prefix ⊗ suffix over occurrences of ``letter``.

    The target must be a declared variable.  In bipartite mode the quotient
    acts on the canonical representative of each word.
    """
    if letter.kind != VAR:
        raise ValueError(f"cannot differentiate in the subalgebra symbol {letter.token()}")
    mode.check_letter(letter)
    pairs = []
    for word, coeff in p.items():
        mode.check_word(word)
        word = normal_form(word, mode)
        for pos, current in enumerate(word):
            if current == letter:
                pairs.append(((word[:pos], word[pos + 1:]), coeff))
    return TensorPoly.from_pairs(pairs)


def bifree_dq(p: NCPolynomial, kind: QuotientKind, mode: AlgebraMode) -> TensorPoly:
    """One of the four two-faced difference quotients (see module docstring)."""
    target = kind.target
    mode.check_letter(target)
    pairs = []
    for word, coeff in p.items():
        mode.check_word(word)
        word = normal_form(word, mode)
        for pos, current in enumerate(word):
            if current != target:
                continue
            prefix, suffix = word[:pos], word[pos + 1:]
            if not kind.flipped:
                if kind.side == LEFT:
                    first = prefix + _rights(suffix)
                    second = _lefts(suffix)
                else:
                    first = prefix + _lefts(suffix)
                    second = _rights(suffix)
            else:
                if kind.side == LEFT:
                    first = _lefts(prefix)
                    second = _rights(prefix) + suffix
                else:
                    first = _rights(prefix)
                    second = _lefts(prefix) + suffix
            pairs.append(
                ((normal_form(first, mode), normal_form(second, mode)), coeff)
            )
    return TensorPoly.from_pairs(pairs)


def scalar_identity_residual(p: NCPolynomial, mode: AlgebraMode) -> TensorPoly:
    """Residual of the commutator identity characterizing scalars.

    For a bipartite polynomial P in the declared variables, the sum of the
    left-quotient commutators minus the leg-swapped sum of the right-quotient
    commutators equals P ⊗ 1 - 1 ⊗ P; the returned tensor is the left side
    minus the right side and vanishes identically.
    """
    if not mode.bipartite:
        raise ValueError("the scalar identity lives in bipartite mode")
    for word, _ in p.items():
        for letter in word:
            if letter.kind != VAR:
                raise ValueError("the scalar identity covers variables only")
    p = normalize_poly(p, mode)
    one = NCPolynomial.one()
    acc = TensorPoly.zero()
    for i in range(1, mode.left_arity + 1):
        x = NCPolynomial.from_letter(Letter(LEFT, i, VAR))
        d = bifree_dq(p, QuotientKind(LEFT, i), mode)
        acc = acc + tensor_mul(d, tensor_of(x, one), STRAIGHT, mode)
        acc = acc - tensor_mul(tensor_of(one, x), d, STRAIGHT, mode)
    right_sum = TensorPoly.zero()
    for j in range(1, mode.right_arity + 1):
        y = NCPolynomial.from_letter(Letter(RIGHT, j, VAR))
        d = bifree_dq(p, QuotientKind(RIGHT, j), mode)
        right_sum = right_sum + tensor_mul(d, tensor_of(y, one), STRAIGHT, mode)
        right_sum = right_sum - tensor_mul(tensor_of(one, y), d, STRAIGHT, mode)
    acc = acc - tensor_swap(right_sum)
    acc = acc - (tensor_of(p, one) - tensor_of(one, p))
    return acc


# -- conjugate variables -------------------------------------------------------


def enumerate_words(mode: AlgebraMode, max_degree: int) -> Iterator[Word]:
    """Canonical words in the declared variables up to the degree bound.

    Bipartite mode yields normal forms (left word times right word); free
    mode yields every word.  The empty word comes first, then by degree.
    """
    lefts = [Letter(LEFT, i + 1, VAR) for i in range(mode.left_arity)]
    rights = [Letter(RIGHT, j + 1, VAR) for j in range(mode.right_arity)]
    if mode.bipartite:
        for degree in range(max_degree + 1):
            for a in range(degree, -1, -1):
                b = degree - a
                for lw in product(lefts, repeat=a):
                    for rw in product(rights, repeat=b):
                        yield lw + rw
    else:
        alphabet = lefts + rights
        for degree in range(max_degree + 1):
            for word in product(alphabet, repeat=degree):
                yield word


@dataclass(frozen=True)
class ConjugateReport:
    """Outcome of checking the defining moment identity on a finite word set."""

    kind: QuotientKind
    max_degree: int
    checked: int
    failures: tuple[tuple[Word, Fraction, Fraction], ...]

    @property
    def passed(self) -> bool:
        return not self.failures

    @property
    def first_failure(self) -> tuple[Word, Fraction, Fraction] | None:
        return self.failures[0] if self.failures else None


def conjugate_check(
    phi: MomentFunctional,
    kind: QuotientKind,
    xi: NCPolynomial,
    max_degree: int,
    mode: AlgebraMode | None = None,
) -> ConjugateReport:
    """Compare phi(Z xi) with (phi ⊗ phi) of the quotient of Z, exactly,
    for every word Z in the declared variables up to ``max_degree``."""
    if kind.flipped:
        raise ValueError("conjugate variables pair with the non-flipped quotients")
    mode = mode or phi.mode
    checked = 0
    failures: list[tuple[Word, Fraction, Fraction]] = []
    for word in enumerate_words(mode, max_degree):
        z = NCPolynomial.from_word(word)
        lhs = phi.phi_poly(mul(z, xi, mode))
        rhs = phi.phi_tensor(bifree_dq(z, kind, mode))
        checked += 1
        if lhs != rhs:
            failures.append((word, lhs, rhs))
    return ConjugateReport(kind, max_degree, checked, tuple(failures))


# -- adjoints of the flipped quotients ------------------------------------------


def _validate_adjoint_leg(word: Word, side: str, which: str) -> None:
    for letter in word:
        if letter.side != side:
            raise ValueError(
                f"{which} tensor leg must be pure-{'left' if side == LEFT else 'right'}; "
                f"got letter {letter.token()} (adjoint domain beyond this span is unsettled)"
            )


def adjoint_apply(
    phi: MomentFunctional,
    xi: NCPolynomial,
    eta: TensorPoly,
    kind: QuotientKind,
    mode: AlgebraMode | None = None,
) -> NCPolynomial:
    """Apply the adjoint of a flipped quotient to a polynomial tensor.

    ``xi`` is the value of the adjoint at 1 ⊗ 1 (the conjugate variable).  A
    term u ⊗ v with u from the quotient's own side and v from the opposite
    side is peeled as (u ⊗ 1)(1 ⊗ v)(1 ⊗ 1), giving

        u v xi - (phi ⊗ id)( dq(u*)^[*] (1 ⊗ v) )

    where ^[*] is the componentwise involution.  The result is independent of
    how u is peeled into factors.
    """
    if not kind.flipped:
        raise ValueError("adjoint_apply takes a flipped quotient kind")
    mode = mode or phi.mode
    own_side = kind.side
    other_side = RIGHT if own_side == LEFT else LEFT
    out = NCPolynomial.zero()
    for (u, v), coeff in eta.items():
        _validate_adjoint_leg(u, own_side, "first")
        _validate_adjoint_leg(v, other_side, "second")
        u_poly = NCPolynomial.from_word(u)
        v_poly = NCPolynomial.from_word(v)
        main = mul(mul(u_poly, v_poly, mode), xi, mode)
        d = bifree_dq(star(u_poly), kind, mode)
        prod = tensor_mul(
            tensor_cw_star(d),
            tensor_of(NCPolynomial.one(), v_poly),
            STRAIGHT,
            mode,
        )
        correction = NCPolynomial.zero()
        for (w1, w2), c in prod.items():
            correction = correction + NCPolynomial.from_word(w2, c * phi.phi(w1))
        out = out + (main - correction).scale(coeff)
    return out
