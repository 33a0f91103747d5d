"""Moment functionals, partitioned moments, and cumulants over bi-non-crossing lattices.

A moment functional assigns an exact rational to every word up to a degree
bound.  It can be backed by an explicit word table or by a cumulant
specification (a map from letter patterns to rationals), in which case
moments are produced by summing block-factored cumulants over the
bi-non-crossing lattice.  The inverse transform recovers cumulants from
moments by Mobius inversion.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .bnclattice import (
    BNCPartition,
    ChiSeq,
    enumerate_bnc,
    hat_chi,
    hat_embed,
    hat_zero,
    join,
    mobius,
    one_partition,
    validate_chi,
)
from .ncalg import (
    LEFT,
    RIGHT,
    VAR,
    AlgebraMode,
    Letter,
    NCPolynomial,
    TensorPoly,
    Word,
    normal_form,
)

#: A cumulant pattern: the ordered (side, index) pairs of the entries.
Pattern = tuple[tuple[str, int], ...]

DEFAULT_DEGREE_BOUND = 10


class DegreeBoundError(ValueError):
    """A word or argument list exceeds the functional's degree bound."""


@dataclass(frozen=True)
class CumulantSpec:
    """Finitely supported cumulant data: pattern -> rational, default 0."""

    n: int
    m: int
    entries: Mapping[Pattern, Fraction]
    degree_bound: int = DEFAULT_DEGREE_BOUND

    def __post_init__(self) -> None:
        clean: dict[Pattern, Fraction] = {}
        for pattern, value in self.entries.items():
            pattern = tuple((side, int(index)) for side, index in pattern)
            for side, index in pattern:
                if side not in (LEFT, RIGHT):
                    raise ValueError(f"bad side {side!r} in pattern")
                arity = self.n if side == LEFT else self.m
                if not 1 <= index <= arity:
                    raise ValueError(f"pattern index {index} out of range for side {side}")
            if len(pattern) > self.degree_bound:
                raise DegreeBoundError("pattern longer than degree bound")
            value = Fraction(value)
            if value:
                clean[pattern] = value
        object.__setattr__(self, "entries", clean)

    def kappa(self, pattern: Pattern) -> Fraction:
        return self.entries.get(tuple(pattern), Fraction(0))

    def with_entry(self, pattern: Pattern, value: Fraction | int) -> "CumulantSpec":
        entries = dict(self.entries)
        entries[tuple(pattern)] = Fraction(value)
        return CumulantSpec(self.n, self.m, entries, self.degree_bound)


def pattern_of_letters(letters: Sequence[Letter]) -> Pattern:
    return tuple((l.side, l.index) for l in letters)


def gaussian_cumulant_spec(
    n: int, m: int, cov: Sequence[Sequence[Fraction | int]],
    degree_bound: int = DEFAULT_DEGREE_BOUND,
) -> CumulantSpec:
    """Central-limit cumulant data from a covariance table.

    ``cov`` is an (n+m) x (n+m) symmetric table indexed with lefts first.
    Only the pair cumulants are nonzero.
    """
    k = n + m
    if len(cov) != k or any(len(row) != k for row in cov):
        raise ValueError("covariance table has wrong shape")
    letters = [(LEFT, i + 1) for i in range(n)] + [(RIGHT, j + 1) for j in range(m)]
    entries: dict[Pattern, Fraction] = {}
    for a in range(k):
        for b in range(k):
            value = Fraction(cov[a][b])
            if Fraction(cov[b][a]) != value:
                raise ValueError("covariance table must be symmetric")
            if value:
                entries[(letters[a], letters[b])] = value
    return CumulantSpec(n, m, entries, degree_bound)


class MomentFunctional:
    """Base class: a unital linear functional on words, exact and memoizable."""

    mode: AlgebraMode
    degree_bound: int

    def phi(self, word: Word) -> Fraction:
        raise NotImplementedError

    def _check_degree(self, degree: int) -> None:
        if degree > self.degree_bound:
            raise DegreeBoundError(
                f"degree {degree} exceeds bound {self.degree_bound}"
            )

    def phi_poly(self, p: NCPolynomial) -> Fraction:
        return sum((c * self.phi(w) for w, c in p.items()), Fraction(0))

    def phi_tensor(self, t: TensorPoly) -> Fraction:
        return sum(
            (c * self.phi(w1) * self.phi(w2) for (w1, w2), c in t.items()),
            Fraction(0),
        )

    def inner(self, a: NCPolynomial, b: NCPolynomial) -> Fraction:
        """Sesquilinear pairing <a, b> = phi(b* a) (rational coefficients)."""
        from .ncalg import mul, star

        return self.phi_poly(mul(star(b), a, self.mode))


class TableMomentFunctional(MomentFunctional):
    """Moment functional backed by an explicit word table (default 0)."""

    def __init__(
        self,
        mode: AlgebraMode,
        table: Mapping[Word, Fraction | int],
        degree_bound: int = DEFAULT_DEGREE_BOUND,
    ):
        self.mode = mode
        self.degree_bound = degree_bound
        data: dict[Word, Fraction] = {}
        for word, value in table.items():
            word = normal_form(tuple(word), mode)
            mode.check_word(word)
            if len(word) > degree_bound:
                raise DegreeBoundError("table word exceeds degree bound")
            data[word] = Fraction(value)
        if data.get((), Fraction(1)) != 1:
            raise ValueError("the empty word must have moment 1")
        data[()] = Fraction(1)
        self._table = data

    def phi(self, word: Word) -> Fraction:
        word = normal_form(tuple(word), self.mode)
        self._check_degree(len(word))
        return self._table.get(word, Fraction(0))


class CumulantMomentFunctional(MomentFunctional):
    """Moments computed on demand from a cumulant specification; memoized."""

    def __init__(self, mode: AlgebraMode, spec: CumulantSpec):
        if mode.left_arity != spec.n or mode.right_arity != spec.m:
            raise ValueError("mode arities disagree with the cumulant data")
        self.mode = mode
        self.spec = spec
        self.degree_bound = spec.degree_bound
        self._memo: dict[Word, Fraction] = {(): Fraction(1)}

    def phi(self, word: Word) -> Fraction:
        word = normal_form(tuple(word), self.mode)
        self._check_degree(len(word))
        cached = self._memo.get(word)
        if cached is not None:
            return cached
        for letter in word:
            if letter.kind != VAR:
                raise ValueError("cumulant-backed functionals cover variables only")
        chi = tuple(l.side for l in word)
        value = moments_from_cumulants(self.spec, chi, [(l,) for l in word])
        self._memo[word] = value
        return value


def _block_word(args: Sequence[Word], block: Sequence[int]) -> Word:
    out: list[Letter] = []
    for position in sorted(block):
        out.extend(args[position - 1])
    return tuple(out)


def moment_pi(phi: MomentFunctional, pi: BNCPartition, args: Sequence[Word]) -> Fraction:
    """Partitioned moment: product over blocks of phi of the in-block product,
    factors multiplied in increasing position order."""
    if len(args) != len(pi.chi):
        raise ValueError("argument count must match |chi|")
    phi._check_degree(sum(len(w) for w in args))
    value = Fraction(1)
    for block in pi.blocks:
        value *= phi.phi(_block_word(args, block))
    return value


def cumulant_chi(phi: MomentFunctional, chi: Sequence[str], args: Sequence[Word]) -> Fraction:
    """Mobius-inversion cumulant of the arguments against the functional."""
    chi = validate_chi(chi)
    if len(args) != len(chi):
        raise ValueError("argument count must match |chi|")
    top = one_partition(chi)
    total = Fraction(0)
    for pi in enumerate_bnc(chi):
        total += moment_pi(phi, pi, args) * mobius(pi, top)
    return total


def cumulant_pi(phi: MomentFunctional, pi: BNCPartition, args: Sequence[Word]) -> Fraction:
    """Block-factored cumulant: product of cumulants of the restricted arguments."""
    value = Fraction(1)
    for block in pi.blocks:
        ordered = sorted(block)
        chi_v = tuple(pi.chi[p - 1] for p in ordered)
        args_v = [args[p - 1] for p in ordered]
        value *= cumulant_chi(phi, chi_v, args_v)
    return value


def moments_from_cumulants(
    spec: CumulantSpec, chi: Sequence[str], args: Sequence[Word]
) -> Fraction:
    """Moment of single-letter arguments under a cumulant specification:
    the sum over the lattice of block-factored cumulants."""
    chi = validate_chi(chi)
    if len(args) != len(chi):
        raise ValueError("argument count must match |chi|")
    letters: list[Letter] = []
    for word, label in zip(args, chi):
        if len(word) != 1:
            raise ValueError("cumulant-specified moments take single letters")
        letter = word[0]
        if letter.side != label:
            raise ValueError(f"argument side {letter.side} disagrees with chi label {label}")
        letters.append(letter)
    if len(letters) > spec.degree_bound:
        raise DegreeBoundError("degree bound exceeded")
    total = Fraction(0)
    for pi in enumerate_bnc(chi):
        product = Fraction(1)
        for block in pi.blocks:
            pattern = pattern_of_letters([letters[p - 1] for p in sorted(block)])
            product *= spec.kappa(pattern)
            if not product:
                break
        total += product
    return total


def expand_product_last_entry(
    pi: BNCPartition, chi: Sequence[str], chi_prime: Sequence[str]
) -> tuple[BNCPartition, ...]:
    """Partitions realizing a product in the last entry.

    Returns the partitions sigma over the extended side sequence whose join
    with the bottom-block embedding of the discrete partition equals the
    embedding of ``pi``; summing block-factored cumulants over them expands a
    cumulant whose last entry is the product of the new letters.
    """
    chi = validate_chi(chi)
    if pi.chi != chi:
        raise ValueError("pi must live over chi")
    pi_hat = hat_embed(pi, chi_prime)
    bottom = hat_zero(chi, chi_prime)
    extended = hat_chi(chi, chi_prime)
    return tuple(
        sigma
        for sigma in enumerate_bnc(extended)
        if join(sigma, bottom).blocks == pi_hat.blocks
    )


# -- mixed-cumulant vanishing -------------------------------------------------


@dataclass(frozen=True)
class VanishingViolation:
    chi: ChiSeq
    args: tuple[Word, ...]
    value: Fraction


@dataclass(frozen=True)
class VanishingReport:
    checked: int
    violations: tuple[VanishingViolation, ...]

    @property
    def passed(self) -> bool:
        return not self.violations


def check_mixed_vanishing(
    spec: CumulantSpec,
    grouping: Mapping[tuple[str, int], object],
    max_degree: int = 4,
    max_product_len: int = 2,
) -> VanishingReport:
    """Verify that cumulants with a one-group product in the last entry vanish
    whenever an earlier entry comes from a different group.

    ``grouping`` maps (side, index) variable keys to group labels.  All
    cumulants with at most ``max_degree`` total letters are checked, the last
    entry ranging over products of up to ``max_product_len`` letters from a
    single group.  Violations are collected, not raised.
    """
    mode = AlgebraMode("free", spec.n, spec.m)
    phi = CumulantMomentFunctional(mode, spec)
    letters = [Letter(LEFT, i + 1, VAR) for i in range(spec.n)] + [
        Letter(RIGHT, j + 1, VAR) for j in range(spec.m)
    ]
    groups = {pattern_of_letters([l])[0]: grouping[(l.side, l.index)] for l in letters}

    def letter_group(letter: Letter) -> object:
        return groups[(letter.side, letter.index)]

    by_group: dict[object, list[Letter]] = {}
    for letter in letters:
        by_group.setdefault(letter_group(letter), []).append(letter)

    checked = 0
    violations: list[VanishingViolation] = []

    def product_words(group: object, length: int):
        pool = by_group[group]
        if length == 0:
            yield ()
            return
        for head in pool:
            for rest in product_words(group, length - 1):
                yield (head,) + rest

    def front_tuples(length: int):
        if length == 0:
            yield ()
            return
        for head in letters:
            for rest in front_tuples(length - 1):
                yield (head,) + rest

    for last_group in by_group:
        for product_len in range(1, max_product_len + 1):
            for last_word in product_words(last_group, product_len):
                for front_len in range(1, max_degree - product_len + 1):
                    for front in front_tuples(front_len):
                        if all(letter_group(l) == last_group for l in front):
                            continue  # omega constant: nothing to check
                        chi = tuple(l.side for l in front) + ("l",)
                        args = [(l,) for l in front] + [tuple(last_word)]
                        value = cumulant_chi(phi, chi, args)
                        checked += 1
                        if value:
                            violations.append(
                                VanishingViolation(chi, tuple(args), value)
                            )
    return VanishingReport(checked, tuple(violations))


# -- JSON ---------------------------------------------------------------------


def spec_to_json_dict(spec: CumulantSpec) -> dict:
    return {
        "n": spec.n,
        "m": spec.m,
        "degree_bound": spec.degree_bound,
        "entries": [
            {"pattern": [[side, index] for side, index in pattern], "value": str(value)}
            for pattern, value in sorted(spec.entries.items())
        ],
    }


def spec_from_json_dict(data: Mapping) -> CumulantSpec:
    entries: dict[Pattern, Fraction] = {}
    for item in data.get("entries", []):
        pattern = tuple((side, int(index)) for side, index in item["pattern"])
        entries[pattern] = Fraction(str(item["value"]))
    return CumulantSpec(
        n=int(data["n"]),
        m=int(data["m"]),
        entries=entries,
        degree_bound=int(data.get("degree_bound", DEFAULT_DEGREE_BOUND)),
    )


def save_spec(spec: CumulantSpec, path: str) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(spec_to_json_dict(spec), handle, indent=2)
        handle.write("\n")


def load_spec(path: str) -> CumulantSpec:
    with open(path, encoding="utf-8") as handle:
        return spec_from_json_dict(json.load(handle))
