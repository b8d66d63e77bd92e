"""High-precision oracle values frozen into the test suite.

Run before the build; not a runtime component.  Prints reference values
to 30 significant digits using mpmath.
"""
import mpmath as mp

mp.mp.dps = 50


def psi(k, x):
    return mp.polygamma(k, mp.mpf(x))


def xi(mu, rho):
    a, b = psi(1, rho), psi(1, mu - rho)
    return a / (a + b), b / (a + b)


def shape_f(mu, rho):
    a, b = psi(1, rho), psi(1, mu - rho)
    return (-a * psi(0, mu - rho) - b * psi(0, rho)) / (a + b)


def slope(mu, z):
    return psi(1, mu / 2 - mp.mpf(z)) / psi(1, mu / 2 + mp.mpf(z))


def inv_slope(mu, m):
    return mp.findroot(lambda z: slope(mu, z) - m, mp.mpf("0.1"))


def shape_at(mu, p):
    z = inv_slope(mu, mp.mpf(p[1]) / p[0])
    return (p[0] + p[1]) * shape_f(mu, mu / 2 + z)


if __name__ == "__main__":
    show = lambda name, v: print(f"{name} = {mp.nstr(v, 30)}")
    show("psi0(1)", psi(0, 1))
    show("psi1(1)", psi(1, 1))
    show("psi2(1)", psi(2, 1))
    show("psi0(2)", psi(0, 2))
    show("psi1(0.5)", psi(1, 0.5))
    show("psi1(1.5)", psi(1, 1.5))
    show("psi0(7.25)", psi(0, 7.25))
    show("psi1(0.003)", psi(1, mp.mpf("0.003")))
    show("psi2(100000.5)", psi(2, mp.mpf("100000.5")))
    x1, x2 = xi(2, mp.mpf("0.5"))
    show("xi[0.5]_1 (mu=2)", x1)
    show("xi[0.5]_2 (mu=2)", x2)
    show("f(0.5) mu=2", shape_f(2, mp.mpf("0.5")))
    show("f(1) mu=2", shape_f(2, 1))
    show("z(1.25) mu=2", inv_slope(2, mp.mpf("1.25")))
    show("shape_at (40,60) mu=2", shape_at(2, (40, 60)))
    show("30*gamma", 30 * mp.euler)
    show("half psi2(1)", psi(2, 1) / 2)
