#!/usr/bin/env python3
"""Generate high-precision reference values for the test suite.

Produces crates/core/fixtures/reference.csv with columns
(d, alpha, Do, Df, t, y, reference, est_accuracy, recipe_id) and prints a
handful of scalar reference values that are frozen into unit tests.

Recipes:
  quad-bessel  : direct mpmath quadrature of the radial Bessel representation
                 (fast Gaussian decay, subdivided finite interval)
  quadosc-cos  : mpmath quadosc of the 1-d cosine representation
                 (oscillatory, slowly decaying integrand)
  closed-zero  : closed form for y = 0, Do = 0
  quad-zero    : quadrature of the radial y = 0 representation

Requires mpmath.  Run from the repository root:
  python3 scripts/gen_fixtures.py
"""

import csv
from mpmath import mp, mpf, mpc, besselj, gamma, pi, cos, exp, quad, quadosc, inf, sqrt, erfc

mp.dps = 40

OUT = "crates/core/fixtures/reference.csv"


def sphere_area(d):
    # S_{d-1} = 2 pi^{d/2} / Gamma(d/2)
    return 2 * pi ** (mpf(d) / 2) / gamma(mpf(d) / 2)


def density(d, alpha, Do, Df, t, y):
    """p~(y, t) via direct quadrature of the radial representation."""
    Do, Df, t, y, alpha = mpf(Do), mpf(Df), mpf(t), mpf(y), mpf(alpha)

    def decay(r):
        return exp(-(Do * r ** 2 + Df * r ** (2 * alpha)) * t)

    if y == 0:
        if Do == 0:
            val = sphere_area(d) / ((2 * pi) ** d * d) * (Df * t) ** (-mpf(d) / (2 * alpha)) \
                * gamma(mpf(d) / (2 * alpha) + 1)
            return val, mpf("1e-38"), "closed-zero"
        f = lambda r: (r / (2 * pi)) ** (d - 1) * decay(r)
        R = sqrt(90 / (Do * t))
        pts = [R * mpf(k) / 24 for k in range(25)]
        val, err = quad(f, pts, error=True)
        val *= sphere_area(d) / (2 * pi)
        return val, err / abs(val), "quad-zero"

    if Do > 0:
        # Gaussian factor kills the tail; finite subdivided interval.
        nu = mpf(d - 2) / 2
        if d == 1:
            f = lambda r: cos(y * r) / pi * decay(r)
            scale = mpf(1)
        else:
            f = lambda r: (r / (2 * pi)) ** (mpf(d) / 2) * besselj(nu, y * r) * decay(r)
            scale = y ** (-nu)
        R = sqrt(90 / (Do * t))
        n = max(24, int(2 * y * R))  # resolve the oscillation
        pts = [R * mpf(k) / n for k in range(n + 1)]
        val, err = quad(f, pts, error=True)
        val *= scale
        return val, abs(err / val), "quad-bessel"

    # Do = 0, oscillatory with slow decay: quadosc on the cosine form (d = 1 only here).
    assert d == 1
    f = lambda r: cos(y * r) / pi * decay(r)
    val = quadosc(f, [0, inf], period=2 * pi / y)
    return val, mpf("1e-25"), "quadosc-cos"


def main():
    rows = []

    def emit(d, alpha, Do, Df, t, y):
        val, acc, recipe = density(d, alpha, Do, Df, t, y)
        rows.append([d, mp.nstr(mpf(alpha), 17), Do, Df, mp.nstr(mpf(t), 17),
                     mp.nstr(mpf(y), 17), mp.nstr(val, 22), mp.nstr(acc, 3), recipe])

    ys = [mpf(2) * k / 50 for k in range(51)]

    # Mixed diffusion, alpha = 1/2.
    for d in (1, 3, 5, 9):
        for t in ("0.04", "0.1", "0.2"):
            for y in ys:
                emit(d, "0.5", 1, 8, t, y)
            print(f"done d={d} t={t} (mixed)")

    # Pure fractional, alpha = 1/3, d = 1.
    for t in ("0.1", "0.2"):
        for y in ys:
            emit(1, mp.nstr(mpf(1) / 3, 17), 0, 8, t, y)
        print(f"done alpha=1/3 t={t}")

    with open(OUT, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["d", "alpha", "Do", "Df", "t", "y", "reference", "est_accuracy", "recipe_id"])
        w.writerows(rows)
    print(f"wrote {len(rows)} rows to {OUT}")

    # Scalar reference values for frozen unit tests.
    print("\n--- scalar references (freeze into tests) ---")
    print("J_{3/2}(10)      =", mp.nstr(besselj(mpf(3) / 2, 10), 20))
    print("J_{1/2}(pi/2)    =", mp.nstr(besselj(mpf(1) / 2, pi / 2), 20))
    print("J_2(7.3)         =", mp.nstr(besselj(2, mpf("7.3")), 20))
    print("J_5(123.4)       =", mp.nstr(besselj(5, mpf("123.4")), 20))
    print("J_0(50000.25)    =", mp.nstr(besselj(0, mpf("50000.25")), 20))
    erfcx = lambda z: exp(z ** 2) * erfc(z)
    print("erfcx(1)         =", mp.nstr(erfcx(mpf(1)), 20))
    print("erfcx(1+1i)      =", mp.nstr(erfcx(mpc(1, 1)), 22))
    print("erfcx(0.3+4.7i)  =", mp.nstr(erfcx(mpc("0.3", "4.7")), 22))
    print("erfcx(8+0.5i)    =", mp.nstr(erfcx(mpc(8, "0.5")), 22))
    print("Gamma(3.7)       =", mp.nstr(gamma(mpf("3.7")), 20))
    print("Gamma_up(2.5,3)  =", mp.nstr(gamma(mpf("2.5")) * mp.gammainc(mpf("2.5"), 3) / mp.gammainc(mpf("2.5")), 20))
    print("Gamma_up(2.5,3)b =", mp.nstr(mp.gammainc(mpf("2.5"), 3), 20))
    # Table 3.2 style reference: I = int_1^inf cos(z) exp(-0.01 z^0.8) dz
    f = lambda z: cos(z) * exp(mpf("-0.01") * z ** mpf("0.8"))
    I = quadosc(f, [1, inf], period=2 * pi)
    print("I_cos_tail       =", mp.nstr(I, 20))
    g1 = quad(f, [0, mpf(1) / 2, 1])
    print("I_cos_local1     =", mp.nstr(g1, 20), " (integral over [0,1], tau=0.01, alpha=0.4)")
    # singular example: f = cos z, alpha=0.4, tau=0.01, L=1
    g2 = quad(lambda z: cos(z) * exp(mpf("-0.01") * z ** mpf("0.8")), [0, "1e-12", "1e-6", "1e-3", 1])
    print("I_cos_local1b    =", mp.nstr(g2, 20))
    # alpha_half_1d oracle point: Do=1, Df=8, t=0.1, y=0.5
    Do, Df, t, y = mpf(1), mpf(8), mpf("0.1"), mpf("0.5")
    val = (erfcx((Df * t - y * mpc(0, 1)) / (2 * sqrt(Do * t)))
           + erfcx((Df * t + y * mpc(0, 1)) / (2 * sqrt(Do * t)))) / (2 * sqrt(4 * pi * Do * t))
    print("p1d(0.5;Do1Df8t.1)=", mp.nstr(val, 22))
    # rational-alpha series point: d=1, alpha=1/3, Df=8, t=0.2, y=0.5
    v, a, r = density(1, mpf(1) / 3, 0, 8, mpf("0.2"), mpf("0.5"))
    print("p13(0.5;Df8t.2)  =", mp.nstr(v, 22), r)
    # d=3 Cauchy: Df t = 0.8, y = 1
    d = 3
    val = gamma(mpf(d + 1) / 2) / pi ** (mpf(d + 1) / 2) * mpf("0.8") / ((mpf("0.8") ** 2 + 1) ** (mpf(d + 1) / 2))
    print("cauchy_d3        =", mp.nstr(val, 20))
    # reweighted moments, alpha = 1/2 (weight e^{-tau z}), closed forms
    print("(1-e^-2)/2       =", mp.nstr((1 - exp(-2)) / 2, 20))
    print("(1-3e^-2)/4      =", mp.nstr((1 - 3 * exp(-2)) / 4, 20))
    # window value at s = 1/2
    print("w(s=1/2)         =", mp.nstr(exp(-8 * exp(-4)), 20))


if __name__ == "__main__":
    main()
