#!/usr/bin/env python3
"""Regenerates tests/data/stein_bound_oracle.csv.

Draws random parameter sets for the association bound and evaluates the
full breakdown with 40-digit arithmetic (mpmath). The C++ evaluator is
required to match every column to 1e-12 relative.
"""
import random

from mpmath import mp, mpf, sqrt, exp, pi

mp.dps = 40

COLUMNS = ("d,M,kappa,lam,gamma,K,r,n,"
           "mu,nu,theta,c1,c2,c3,t1,t2,t3,t4,total")


def breakdown(d, M, kap, lam, gam, K, r, n):
    d = mpf(d); M = mpf(M); kap = mpf(kap); lam = mpf(lam)
    gam = mpf(gam); K = mpf(K); r = mpf(r); n = mpf(n)
    mu = exp(2 * lam / r) / (exp(lam / r) - 1) ** 2
    nu = exp(lam / r) / (exp(lam / r) - 1) ** 2
    bracket = (sqrt(2 * gam) * kap ** (mpf(1) / 3)
               * ((4 * mu + 2 * nu) ** d - (2 * nu) ** d)
               / (mpf(18) ** (d + 1) * sqrt(pi) * d * M))
    theta = lam / 3 * bracket ** (1 / (2 * d + 1))
    c1 = ((9 * mpf(36) ** d * M ** (4 * d + 3)
           * ((4 * mu + 2 * nu) ** d - (2 * nu) ** d) ** (2 * d)
           / (gam ** (2 * d + mpf(3) / 2) * pi ** d)) ** (1 / (2 * d + 1))
          * (1 / (2 * d) ** (2 * d / (2 * d + 1))
             + 2 * (2 * d) ** (1 / (2 * d + 1))))
    c2 = 3 * mpf(6) ** d * kap ** (mpf(1) / 3) * M ** 2 \
        * theta ** (4 * d / 3) / (sqrt(pi) * gam)
    c3 = mpf(2) ** (d + 1) * kap ** (mpf(2) / 3) * M / sqrt(gam)
    t1 = (sqrt(28) * M ** 2 * (2 * K) ** (3 * d / 2) / (gam * sqrt(pi)) + c1) \
        / n ** (d / (4 * d + 2))
    t2 = M ** 3 * (2 * K) ** (2 * d) / (gam ** mpf("1.5") * n ** (d / 6 - 1 / (6 * d + 3)))
    t3 = c2 * n ** (d * (4 * d + 1) / (6 * d + 3)) / exp(theta * n ** (d / (4 * d + 2)))
    t4 = c3 * n ** (7 * d / 6) / exp(2 * theta * n ** (d / (4 * d + 2)))
    return mu, nu, theta, c1, c2, c3, t1, t2, t3, t4, t1 + t2 + t3 + t4


def main():
    rng = random.Random(20240612)
    rows = []
    for _ in range(100):
        d = rng.choice([1, 2, 3])
        M = round(rng.uniform(0.5, 5.0), 12)
        kap = round(rng.uniform(0.1, 10.0), 12)
        lam = round(rng.uniform(0.05, 2.0), 12)
        gam = round(rng.uniform(0.1, 5.0), 12)
        K = round(rng.uniform(0.5, 3.0), 12)
        r = round(rng.uniform(0.5, 4.0), 12)
        n = rng.randint(10, 10000)
        vals = breakdown(d, M, kap, lam, gam, K, r, n)
        inputs = [repr(d), repr(M), repr(kap), repr(lam),
                  repr(gam), repr(K), repr(r), repr(n)]
        outputs = [mp.nstr(v, 25) for v in vals]
        rows.append(",".join(inputs + outputs))
    with open("tests/data/stein_bound_oracle.csv", "w") as f:
        f.write(COLUMNS + "\n")
        f.write("\n".join(rows) + "\n")
    print(f"wrote {len(rows)} rows")


if __name__ == "__main__":
    main()
