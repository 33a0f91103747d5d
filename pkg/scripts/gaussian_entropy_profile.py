#!/usr/bin/env python3
"""Profile a random central-limit family: Fisher information, entropy by the
closed form and by quadrature of the perturbed Fisher profile, and the
entropy dimension by the closed form and the epsilon-limit."""

import argparse

import numpy as np

from bifree.gaussfam import (
    Covariance,
    entropy_closed,
    entropy_dimension,
    entropy_dimension_limit,
    entropy_quadrature,
    fisher,
    fisher_perturbed,
)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n", type=int, default=2, help="left coordinates")
    parser.add_argument("--m", type=int, default=2, help="right coordinates")
    parser.add_argument("--rank", type=int, default=None)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    k = args.n + args.m
    rank = args.rank if args.rank is not None else k
    rng = np.random.default_rng(args.seed)
    b = rng.normal(size=(k, rank))
    cov = Covariance(args.n, args.m, b @ b.T)

    print(f"covariance ({args.n} left, {args.m} right), rank target {rank}")
    print(f"  fisher             = {fisher(cov):.10g}")
    closed = entropy_closed(cov)
    print(f"  entropy (closed)   = {closed:.10g}")
    result = entropy_quadrature(lambda t: fisher_perturbed(cov, t), k)
    print(f"  entropy (quad)     = {result.value:.10g}"
          f"  [bound {result.error_bound:.2g}, {result.evaluations} evals]")
    print(f"  dimension (closed) = {entropy_dimension(cov)}")
    limit = entropy_dimension_limit(lambda t: fisher_perturbed(cov, t), k)
    print(f"  dimension (limit)  = {limit:.8g}")


if __name__ == "__main__":
    main()
