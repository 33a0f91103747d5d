import random
from itertools import product

import pytest

from bifree.bnclattice import (
    BNCPartition,
    CapExceededError,
    catalan,
    enumerate_bnc,
    hat_chi,
    hat_embed,
    hat_zero,
    is_bnc,
    join,
    mobius,
    mobius_zero_one,
    one_partition,
    sigma_chi,
    zero_partition,
)
from helpers import all_set_partitions, rand_chi

LRLR = ("l", "r", "l", "r")


def all_chis(k):
    return [tuple(c) for c in product("lr", repeat=k)]


class TestSigmaChi:
    def test_lr(self):
        assert sigma_chi(("l", "r")) == (1, 2)

    def test_rl(self):
        assert sigma_chi(("r", "l")) == (2, 1)

    def test_lrlr(self):
        assert sigma_chi(LRLR) == (1, 3, 4, 2)

    def test_always_a_bijection(self):
        rng = random.Random(2)
        for k in range(1, 12):
            chi = rand_chi(rng, k)
            assert sorted(sigma_chi(chi)) == list(range(1, k + 1))


class TestEnumeration:
    def test_single_point(self):
        assert len(enumerate_bnc(("l",))) == 1

    @pytest.mark.parametrize("chi", all_chis(3))
    def test_three_points_always_five(self, chi):
        assert len(enumerate_bnc(chi)) == 5

    def test_four_points(self):
        assert len(enumerate_bnc(LRLR)) == 14

    def test_catalan_counts_up_to_seven(self):
        rng = random.Random(4)
        for k in range(1, 8):
            for chi in (("l",) * k, ("r",) * k, rand_chi(rng, k)):
                assert len(enumerate_bnc(chi)) == catalan(k)

    def test_matches_brute_force_filter(self):
        rng = random.Random(11)
        for k in range(1, 7):
            chi = rand_chi(rng, k)
            expected = {
                tuple(sorted(p, key=lambda b: b[0]))
                for p in all_set_partitions(k)
                if is_bnc(p, chi)
            }
            got = {p.blocks for p in enumerate_bnc(chi)}
            assert got == expected

    def test_cap(self):
        with pytest.raises(CapExceededError):
            enumerate_bnc(("l",) * 13)
        with pytest.raises(CapExceededError):
            enumerate_bnc(("l",) * 5, cap=4)

    def test_deterministic_order(self):
        assert enumerate_bnc(LRLR) == enumerate_bnc(LRLR)


class TestJoin:
    def test_with_bottom(self):
        for pi in enumerate_bnc(LRLR):
            assert join(zero_partition(LRLR), pi) == pi

    def test_idempotent(self):
        for pi in enumerate_bnc(LRLR):
            assert join(pi, pi) == pi

    def test_crossingish_example(self):
        sigma = BNCPartition(LRLR, ((1, 3), (2,), (4,)))
        pi = BNCPartition(LRLR, ((2, 4), (1,), (3,)))
        assert join(sigma, pi).blocks == ((1, 3), (2, 4))

    def test_least_upper_bound_randomized(self):
        rng = random.Random(23)
        for k in range(2, 6):
            chi = rand_chi(rng, k)
            lattice = enumerate_bnc(chi)
            for _ in range(30):
                sigma = rng.choice(lattice)
                pi = rng.choice(lattice)
                j = join(sigma, pi)
                assert sigma.leq(j) and pi.leq(j)
                for rho in lattice:
                    if sigma.leq(rho) and pi.leq(rho):
                        assert j.leq(rho)


class TestMobius:
    def test_reflexive(self):
        for pi in enumerate_bnc(("l", "r", "l")):
            assert mobius(pi, pi) == 1

    def test_two_points(self):
        chi = ("l", "r")
        assert mobius(zero_partition(chi), one_partition(chi)) == -1

    def test_three_points(self):
        chi = ("r", "l", "r")
        assert mobius(zero_partition(chi), one_partition(chi)) == 2

    def test_incomparable_rejected(self):
        sigma = BNCPartition(LRLR, ((1, 3), (2,), (4,)))
        pi = BNCPartition(LRLR, ((2, 4), (1,), (3,)))
        with pytest.raises(ValueError):
            mobius(sigma, pi)

    def test_defining_identity_exhaustive(self):
        rng = random.Random(31)
        for k in range(1, 7):
            chi = rand_chi(rng, k)
            lattice = enumerate_bnc(chi)
            for pi in lattice:
                below = [s for s in lattice if s.leq(pi)]
                for sigma in below:
                    total = sum(
                        mobius(rho, pi)
                        for rho in below
                        if sigma.leq(rho)
                    )
                    assert total == (1 if sigma == pi else 0), (chi, sigma, pi)

    def test_full_interval_signed_catalan(self):
        # cross-check of the recursion against the closed form
        rng = random.Random(5)
        for k in range(1, 8):
            chi = rand_chi(rng, k)
            value = mobius(zero_partition(chi), one_partition(chi))
            assert value == (-1) ** (k - 1) * catalan(k - 1)
            assert mobius_zero_one(chi) == value

    def test_block_factorization(self):
        # mu(sigma, pi) equals the product over blocks of pi of the full-interval
        # mu of the restricted partitions
        rng = random.Random(77)
        for _ in range(40):
            k = rng.randint(2, 6)
            chi = rand_chi(rng, k)
            lattice = enumerate_bnc(chi)
            pi = rng.choice(lattice)
            below = [s for s in lattice if s.leq(pi)]
            sigma = rng.choice(below)
            product_value = 1
            for block in pi.blocks:
                order = {e: i + 1 for i, e in enumerate(sorted(block))}
                sub_chi = tuple(chi[e - 1] for e in sorted(block))
                sub_blocks = [
                    tuple(order[e] for e in b)
                    for b in sigma.blocks
                    if b[0] in order
                ]
                sub = BNCPartition(sub_chi, tuple(sub_blocks))
                product_value *= mobius(sub, one_partition(sub_chi))
            assert mobius(sigma, pi) == product_value

    def test_partial_inversion(self):
        # with f(pi) = sum_{sigma <= pi} g(sigma):
        # sum_{sigma <= rho <= pi} f(rho) mu(rho, pi) = sum_{omega v sigma = pi} g(omega)
        from fractions import Fraction

        rng = random.Random(13)
        for k in range(1, 6):
            chi = rand_chi(rng, k)
            lattice = enumerate_bnc(chi)
            g = {p.blocks: Fraction(rng.randint(-5, 5), rng.randint(1, 3)) for p in lattice}
            f = {
                pi.blocks: sum(g[s.blocks] for s in lattice if s.leq(pi))
                for pi in lattice
            }
            for _ in range(10):
                pi = rng.choice(lattice)
                below = [s for s in lattice if s.leq(pi)]
                sigma = rng.choice(below)
                lhs = sum(
                    f[rho.blocks] * mobius(rho, pi)
                    for rho in below
                    if sigma.leq(rho)
                )
                rhs = sum(
                    g[omega.blocks]
                    for omega in lattice
                    if join(omega, sigma) == pi
                )
                assert lhs == rhs


class TestHatEmbedding:
    def test_top_maps_to_top(self):
        for chi_len, prime_len in ((2, 2), (3, 2), (3, 3)):
            chi = ("l", "r", "l")[:chi_len]
            chi_prime = ("r", "l", "r")[:prime_len]
            top = hat_embed(one_partition(chi), chi_prime)
            assert top == one_partition(hat_chi(chi, chi_prime))

    def test_bottom_formula(self):
        chi = ("l", "r")
        chi_prime = ("l", "r")  # positions 2..3
        assert hat_zero(chi, chi_prime).blocks == ((1,), (2, 3))
        embedded = hat_embed(zero_partition(chi), chi_prime)
        assert embedded.blocks == ((1,), (2, 3))

    def test_order_preservation_exhaustive(self):
        rng = random.Random(3)
        for k in range(2, 6):
            chi = rand_chi(rng, k)
            chi_prime = rand_chi(rng, rng.randint(2, 3))
            lattice = enumerate_bnc(chi)
            for sigma in lattice:
                for pi in lattice:
                    if sigma.leq(pi):
                        assert hat_embed(sigma, chi_prime).leq(hat_embed(pi, chi_prime))

    def test_mobius_preserved(self):
        rng = random.Random(41)
        for p in range(2, 5):
            chi = rand_chi(rng, p)
            for extra in (1, 2):
                chi_prime = rand_chi(rng, extra + 1)
                lattice = enumerate_bnc(chi)
                for sigma in lattice:
                    for pi in lattice:
                        if sigma.leq(pi):
                            assert mobius(sigma, pi) == mobius(
                                hat_embed(sigma, chi_prime), hat_embed(pi, chi_prime)
                            )

    def test_image_is_interval_above_hat_zero(self):
        chi = ("l", "r", "l")
        chi_prime = ("l", "l")
        bottom = hat_zero(chi, chi_prime)
        extended = hat_chi(chi, chi_prime)
        image = {hat_embed(p, chi_prime).blocks for p in enumerate_bnc(chi)}
        interval = {
            p.blocks for p in enumerate_bnc(extended) if bottom.leq(p)
        }
        assert image == interval
