#!/usr/bin/env python3
"""Reference values for g(u) = u(1 - u), L = 5, computed with mpmath in the
amplitude variable u (not the scaled variable used by the library).

The printed numbers are frozen into tests/test_problem.cpp, test_timemap.cpp,
test_curves.cpp and test_shooting.cpp.
"""
import mpmath as mp

mp.mp.dps = 30
L = mp.mpf(5)


def g(u):
    return u * (1 - u)


def G(u):
    return u**2 / 2 - u**3 / 3


def F(mu, lam, u):
    return lam * G(u) - mu * u


def B(mu, lam, a, u):
    # F(a) - F(u) = (a - u) [lam (G(a) - G(u)) / (a - u) - mu], exact for this g
    return (a - u) * (lam * ((a + u) / 2 - (a * a + a * u + u * u) / 3) - mu)


def T(mu, lam, a):
    def k(u):
        b = B(mu, lam, a, u)
        return (b + 1) / mp.sqrt(b * (b + 2))

    return mp.quad(k, [0, a / 2, a])


def T0(lam, a):
    return T(0, lam, a)


def roots(mu, lam):
    # lam u (1 - u) = mu and lam (u^2/2 - u^3/3) = mu u
    d = mp.sqrt(1 - 4 * mu / lam)
    vs, beta = (1 - d) / 2, (1 + d) / 2
    e = mp.sqrt(mp.mpf(9) / 16 - 3 * mu / lam)
    theta = mp.mpf(3) / 4 - e
    return vs, theta, beta


def phi(a, lam):
    def k(t):
        E = t * (1 - t) * a * a * (mp.mpf(1) / 2 - a * (1 + t) / 3)
        return a * (lam * E + 1) / mp.sqrt(lam * E * (lam * E + 2))

    return mp.quad(k, [0, mp.mpf(1) / 2, 1])


def lambda_hat(a):
    return mp.findroot(lambda lam: phi(a, lam) - L, (mp.mpf("0.01"), mp.mpf(50)), solver="anderson")


def lambda_bar(mu):
    a = mp.findroot(lambda x: lambda_hat(x) * G(x) / x - mu, (mp.mpf("0.05"), mp.mpf("0.7")), solver="anderson")
    return lambda_hat(a), a


def alpha_tilde(mu, lam):
    _, th, be = roots(mu, lam)
    return mp.findroot(lambda a: mp.diff(lambda x: T(mu, lam, x), a), (th + (be - th) / 10, be - (be - th) / 10),
                       solver="anderson")


def lambda_star(mu, lo, hi):
    return mp.findroot(lambda lam: T(mu, lam, alpha_tilde(mu, lam)) - L, (lo, hi), solver="anderson")


def main():
    mu, lam, a = mp.mpf("0.1"), mp.mpf(1), mp.mpf("0.5")
    vs, th, be = roots(mu, lam)
    print("roots(0.1, 1)", vs, th, be)
    print("T(0.1, 1, 0.5)", T(mu, lam, a))
    print("T(0.1, 1, theta)", T(mu, lam, th))
    print("dT/dalpha(0.1, 1, 0.5)", mp.diff(lambda x: T(mu, lam, x), a))
    print("dT/dmu(0.1, 1, 0.5)", mp.diff(lambda m: T(m, lam, a), mu))
    print("dT/dlambda(0.1, 1, 0.5)", mp.diff(lambda l: T(mu, l, a), lam))
    print("alpha_tilde(0.1, 1)", alpha_tilde(mu, lam))
    print("T0(1, 0.5)", T0(lam, a))
    print("T0(4, 0.9)", T0(mp.mpf(4), mp.mpf("0.9")))
    print("phi(0.3, 1)", phi(mp.mpf("0.3"), lam))
    print("lambda_hat(0.3)", lambda_hat(mp.mpf("0.3")))
    print("lambda_hat(0.001)", lambda_hat(mp.mpf("0.001")))
    lb, ab = lambda_bar(mu)
    print("lambda_bar(0.1)", lb, "theta", ab)
    ls = lambda_star(mu, mp.mpf("0.6"), mp.mpf("0.65"))
    print("lambda_star(0.1)", ls, "alpha_tilde", alpha_tilde(mu, ls))


if __name__ == "__main__":
    main()
