import random
from fractions import Fraction
from itertools import product

import pytest

from bifree.bnclattice import one_partition, zero_partition
from bifree.cumulant import (
    CumulantMomentFunctional,
    CumulantSpec,
    DegreeBoundError,
    TableMomentFunctional,
    check_mixed_vanishing,
    cumulant_chi,
    cumulant_pi,
    expand_product_last_entry,
    gaussian_cumulant_spec,
    load_spec,
    moment_pi,
    moments_from_cumulants,
    pattern_of_letters,
    save_spec,
    spec_from_json_dict,
    spec_to_json_dict,
)
from bifree.derivation import enumerate_words
from bifree.ncalg import bipartite_mode, free_mode, lvar, rvar
from helpers import rand_chi, rand_frac, rand_functional

HALF = Fraction(1, 2)
S, T = (lvar(1),), (rvar(1),)


def semicircular_pair(c):
    mode = bipartite_mode(1, 1)
    spec = gaussian_cumulant_spec(1, 1, [[1, c], [c, 1]])
    return spec, CumulantMomentFunctional(mode, spec)


def letters_for_chi(chi, rng=None, arities=(2, 2)):
    out = []
    for label in chi:
        arity = arities[0] if label == "l" else arities[1]
        idx = rng.randint(1, arity) if rng else 1
        out.append((lvar(idx) if label == "l" else rvar(idx),))
    return out


class TestMomentPi:
    def test_full_partition_is_plain_moment(self):
        rng = random.Random(2)
        phi = rand_functional(rng, free_mode(1, 1), 6)
        chi = ("l", "r", "l")
        args = [S, T, S]
        word = S + T + S
        assert moment_pi(phi, one_partition(chi), args) == phi.phi(word)

    def test_singletons_factorize(self):
        rng = random.Random(3)
        phi = rand_functional(rng, free_mode(1, 1), 6)
        chi = ("l", "r")
        assert moment_pi(phi, zero_partition(chi), [S, T]) == phi.phi(S) * phi.phi(T)

    def test_centred_family_singletons_vanish(self):
        _, phi = semicircular_pair(HALF)
        pi = zero_partition(("l", "r"))
        assert moment_pi(phi, pi, [S, T]) == 0

    def test_degree_bound(self):
        rng = random.Random(4)
        phi = rand_functional(rng, free_mode(1, 1), 3)
        chi = ("l",) * 4
        with pytest.raises(DegreeBoundError):
            moment_pi(phi, one_partition(chi), [S, S, S, S])


class TestCumulantChi:
    def test_order_two_formula(self):
        rng = random.Random(5)
        phi = rand_functional(rng, free_mode(1, 1), 6)
        value = cumulant_chi(phi, ("l", "r"), [S, T])
        assert value == phi.phi(S + T) - phi.phi(S) * phi.phi(T)

    def test_gaussian_pair_covariance(self):
        _, phi = semicircular_pair(HALF)
        assert cumulant_chi(phi, ("l", "r"), [S, T]) == HALF

    def test_gaussian_third_order_vanishes(self):
        _, phi = semicircular_pair(HALF)
        pool = {"l": S, "r": T}
        for chi in product("lr", repeat=3):
            args = [pool[label] for label in chi]
            assert cumulant_chi(phi, chi, args) == 0

    def test_last_entry_side_independence(self):
        rng = random.Random(6)
        mode = free_mode(2, 2)
        for k in range(1, 6):
            phi = rand_functional(rng, mode, k + 1)
            chi = rand_chi(rng, k)
            args = letters_for_chi(chi, rng)
            left_last = cumulant_chi(phi, chi + ("l",), args + [S])
            right_last = cumulant_chi(phi, chi + ("r",), args + [S])
            assert left_last == right_last

    def test_bipartite_commutation_invariance(self):
        # swapping an adjacent left-right pair of entries leaves kappa unchanged
        rng = random.Random(8)
        mode = bipartite_mode(2, 2)
        for _ in range(40):
            k = rng.randint(2, 5)
            phi = rand_functional(rng, mode, k)
            chi = list(rand_chi(rng, k))
            args = letters_for_chi(chi, rng)
            swaps = [i for i in range(k - 1) if chi[i] != chi[i + 1]]
            if not swaps:
                continue
            i = rng.choice(swaps)
            chi2 = list(chi)
            chi2[i], chi2[i + 1] = chi2[i + 1], chi2[i]
            args2 = list(args)
            args2[i], args2[i + 1] = args2[i + 1], args2[i]
            assert cumulant_chi(phi, tuple(chi), args) == cumulant_chi(
                phi, tuple(chi2), args2
            )


class TestMomentsFromCumulants:
    def test_semicircular_fourth_moment(self):
        spec, _ = semicircular_pair(Fraction(0))
        assert moments_from_cumulants(spec, ("l",) * 4, [S] * 4) == 2

    def test_interleaved_pair_moment(self):
        spec, _ = semicircular_pair(HALF)
        value = moments_from_cumulants(spec, ("l", "r", "l", "r"), [S, T, S, T])
        assert value == 1 + HALF * HALF

    def test_first_order_only(self):
        a = Fraction(3, 7)
        spec = CumulantSpec(1, 1, {(("l", 1),): a})
        for k in range(1, 6):
            assert moments_from_cumulants(spec, ("l",) * k, [S] * k) == a ** k

    def test_side_mismatch_rejected(self):
        spec, _ = semicircular_pair(HALF)
        with pytest.raises(ValueError):
            moments_from_cumulants(spec, ("l",), [T])


class TestRoundTrips:
    def chis(self, rng, k):
        if k <= 3:
            return [tuple(c) for c in product("lr", repeat=k)]
        return [rand_chi(rng, k) for _ in range(8)]

    def test_spec_to_moments_to_cumulants(self):
        rng = random.Random(12)
        mode = free_mode(2, 2)
        for k in range(1, 7):
            for chi in self.chis(rng, k):
                entries = {}
                for length in range(1, k + 1):
                    for _ in range(3):
                        sub = rand_chi(rng, length)
                        pattern = tuple(
                            ("l", rng.randint(1, 2)) if lab == "l" else ("r", rng.randint(1, 2))
                            for lab in sub
                        )
                        entries[pattern] = rand_frac(rng)
                spec = CumulantSpec(2, 2, entries, degree_bound=k + 1)
                phi = CumulantMomentFunctional(mode, spec)
                args = letters_for_chi(chi, rng)
                pattern = pattern_of_letters([w[0] for w in args])
                assert cumulant_chi(phi, chi, args) == spec.kappa(pattern)

    def test_moments_to_cumulants_to_moments(self):
        rng = random.Random(13)
        mode = free_mode(1, 1)
        for k in range(1, 7):
            phi = rand_functional(rng, mode, k)
            entries = {}
            for word in enumerate_words(mode, k):
                if not word:
                    continue
                chi = tuple(l.side for l in word)
                entries[pattern_of_letters(word)] = cumulant_chi(
                    phi, chi, [(l,) for l in word]
                )
            spec = CumulantSpec(1, 1, entries, degree_bound=k)
            for word in enumerate_words(mode, k):
                if not word:
                    continue
                chi = tuple(l.side for l in word)
                assert (
                    moments_from_cumulants(spec, chi, [(l,) for l in word])
                    == phi.phi(word)
                )


class TestProductExpansion:
    def test_two_point_moment_consistency(self):
        rng = random.Random(14)
        phi = rand_functional(rng, free_mode(1, 1), 4)
        chi, chi_prime = ("l",), ("l", "r")
        sigmas = expand_product_last_entry(one_partition(chi), chi, chi_prime)
        assert len(sigmas) == 2  # both partitions of a 2-element set
        total = sum(cumulant_pi(phi, s, [S, T]) for s in sigmas)
        assert total == phi.phi(S + T)

    def test_three_point_expansion_structure(self):
        chi, chi_prime = ("l", "l"), ("l", "l")
        sigmas = expand_product_last_entry(one_partition(chi), chi, chi_prime)
        got = {s.blocks for s in sigmas}
        assert got == {((1, 2, 3),), ((1, 2), (3,)), ((1, 3), (2,))}

    def test_against_direct_cumulant_200_random(self):
        rng = random.Random(15)
        mode = free_mode(2, 2)
        pool = [lvar(1), lvar(2), rvar(1), rvar(2)]
        for _ in range(200):
            total_len = rng.randint(2, 5)
            p = rng.randint(1, total_len - 1)
            q_minus_p = total_len - p
            letters = [rng.choice(pool) for _ in range(total_len)]
            phi = rand_functional(rng, mode, total_len + 1)
            chi = tuple(l.side for l in letters[: p - 1]) + ("l",)
            chi_prime = tuple(l.side for l in letters[p - 1 :])
            # direct: the product word sits in the last entry
            direct_args = [(l,) for l in letters[: p - 1]] + [tuple(letters[p - 1 :])]
            direct = cumulant_chi(phi, chi, direct_args)
            expanded_args = [(l,) for l in letters]
            sigmas = expand_product_last_entry(one_partition(chi), chi, chi_prime)
            expanded = sum(cumulant_pi(phi, s, expanded_args) for s in sigmas)
            assert direct == expanded


class TestMixedVanishing:
    def block_diagonal_spec(self):
        # two pairs: group 1 = (l1, r1) with covariance 1/2, group 2 = (l2, r2)
        # with covariance 1/3; no cross-group cumulants
        c1, c2 = Fraction(1, 2), Fraction(1, 3)
        z = Fraction(0)
        cov = [
            [1, z, c1, z],
            [z, 1, z, c2],
            [c1, z, 1, z],
            [z, c2, z, 1],
        ]
        return gaussian_cumulant_spec(2, 2, cov)

    GROUPS = {("l", 1): 1, ("r", 1): 1, ("l", 2): 2, ("r", 2): 2}

    def test_block_diagonal_passes(self):
        report = check_mixed_vanishing(self.block_diagonal_spec(), self.GROUPS, max_degree=4)
        assert report.passed
        assert report.checked > 0

    def test_single_group_vacuous(self):
        spec = gaussian_cumulant_spec(1, 1, [[1, HALF], [HALF, 1]])
        groups = {("l", 1): 1, ("r", 1): 1}
        report = check_mixed_vanishing(spec, groups, max_degree=4)
        assert report.passed
        assert report.checked == 0

    def test_corrupted_spec_reported(self):
        spec = self.block_diagonal_spec().with_entry((("l", 1), ("l", 2)), 1)
        spec = spec.with_entry((("l", 2), ("l", 1)), 1)
        report = check_mixed_vanishing(spec, self.GROUPS, max_degree=3)
        assert not report.passed
        assert report.violations


class TestSpecJson:
    def test_round_trip(self, tmp_path):
        spec = gaussian_cumulant_spec(1, 1, [[1, HALF], [HALF, 1]], degree_bound=8)
        path = tmp_path / "spec.json"
        save_spec(spec, str(path))
        loaded = load_spec(str(path))
        assert loaded.n == spec.n and loaded.m == spec.m
        assert loaded.degree_bound == spec.degree_bound
        assert dict(loaded.entries) == dict(spec.entries)

    def test_dict_round_trip(self):
        spec = CumulantSpec(2, 1, {(("l", 2), ("r", 1)): Fraction(-5, 3)})
        assert spec_from_json_dict(spec_to_json_dict(spec)).entries == spec.entries


class TestFunctionals:
    def test_empty_word_moment_is_one(self):
        mode = free_mode(1, 1)
        phi = TableMomentFunctional(mode, {(): Fraction(1), S: HALF})
        assert phi.phi(()) == 1
        with pytest.raises(ValueError):
            TableMomentFunctional(mode, {(): Fraction(2)})

    def test_bipartite_table_constant_on_classes(self):
        mode = bipartite_mode(1, 1)
        phi = TableMomentFunctional(mode, {S + T: Fraction(5)})
        assert phi.phi(T + S) == 5

    def test_cumulant_backed_degree_bound(self):
        spec, phi = semicircular_pair(HALF)
        with pytest.raises(DegreeBoundError):
            phi.phi(S * 11)

    def test_cumulant_backed_matches_direct_sum(self):
        spec, phi = semicircular_pair(HALF)
        word = S + T + S + T + S + S
        assert phi.phi(word) == moments_from_cumulants(
            spec, tuple(l.side for l in word), [(l,) for l in word]
        )
