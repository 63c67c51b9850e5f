"""High-precision reference values pinned in crates/core/tests/fixtures.rs.

Independent of the Rust code: plain Chebyshev recursions in mpmath and
adaptive quadrature of |density - 1| against the semicircle law.

    python3 scripts/reference_values.py
"""

import sys

from mpmath import acosh, cos, fabs, linspace, mp, mpf, nstr, pi, quad, sin

mp.dps = 30


def cheb_u(count, x):
    out = [mpf(1), x]
    for _ in range(count):
        out.append(x * out[-1] - out[-2])
    return out


def threshold_ratio(s, d):
    """B / (B - A) with A = acosh(s/2), B = acosh(d/2); k0 is the next integer."""
    a, b = acosh(s / 2), acosh(d / 2)
    return b / (b - a)


def pure_coefficients(s, d, k, step, terms):
    us, ud = cheb_u(step * terms + 1, s), cheb_u(step * terms + 1, d)
    return [None] + [us[step * n] ** k / ud[step * n] ** (k - 1) for n in range(1, terms + 1)]


def total_variation(coef, step, terms):
    def density_minus_one(theta):
        us = cheb_u(step * terms + 1, 2 * cos(theta))
        return sum(coef[n] * us[step * n] for n in range(1, terms + 1))

    grid = linspace(0, pi, 4 * step * terms + 64)
    values = [density_minus_one(g) for g in grid]
    cuts = [mpf(0)]
    for a, b, fa, fb in zip(grid, grid[1:], values, values[1:]):
        if fa * fb < 0:
            lo, hi = a, b
            for _ in range(100):
                mid = (lo + hi) / 2
                if density_minus_one(lo) * density_minus_one(mid) <= 0:
                    hi = mid
                else:
                    lo = mid
            cuts.append((lo + hi) / 2)
    cuts.append(pi)
    total = 0
    for a, b in zip(cuts, cuts[1:]):
        nodes = linspace(a, b, max(2, int(step * terms * (b - a) / 2) + 2))
        total += fabs(quad(lambda th: density_minus_one(th) * sin(th) ** 2, nodes))
    return total / pi


def main():
    for s, d in [(8, 10), (3, 4), (6, 10), (16, 20), (4, 8)]:
        print(f"k0 ratio s={s} d={d}:", nstr(threshold_ratio(mpf(s), mpf(d)), 12))
    cases = [
        ("oplus N=10 t=6 k=5", mpf(6), mpf(10), 5, 1, 120),
        ("oplus N=10 t=6 k=6", mpf(6), mpf(10), 6, 1, 80),
        ("oplus N=10 t=6 k=20", mpf(6), mpf(10), 20, 1, 30),
        ("oplus N=10 t=8 k=11", mpf(8), mpf(10), 11, 1, 200),
        ("oplus N=8 t=4 k=3", mpf(4), mpf(8), 3, 1, 260),
        ("oplus N=10 t=1 k=2", mpf(1), mpf(10), 2, 1, 40),
        # Even families in u_{2n} form: splus N=9 t=0 uses (sqrt t, sqrt N),
        # aut N=4 theta=pi has t = (N - 4)^2 = 0 and dimension argument N.
        ("splus N=9 t=0 k=2", mpf(0), mpf(3), 2, 2, 30),
        ("aut N=4 theta=pi k=2", mpf(0), mpf(4), 2, 2, 30),
    ]
    for label, s, d, k, step, terms in cases:
        value = total_variation(pure_coefficients(s, d, k, step, terms), step, terms)
        print(f"{label}:", nstr(value, 17))
        sys.stdout.flush()


if __name__ == "__main__":
    main()
