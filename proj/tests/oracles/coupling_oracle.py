"""Independent scalar evaluation of the dipole-dipole couplings.

Uses the textbook closed forms in terms of xi = k0 r and the angle between
the dipole and the separation, not the tensor product used by the library.
Values printed here are frozen into tests/test_coupling.cpp.
"""
from mpmath import mp, mpf, sin, cos, pi

mp.dps = 40


def couplings(r, cos_angle, gamma0=mpf(1)):
    xi = 2 * pi * r
    c2 = cos_angle ** 2
    omega = mpf(3) / 4 * gamma0 * (-(1 - c2) * cos(xi) / xi
                                  + (1 - 3 * c2) * (sin(xi) / xi**2 + cos(xi) / xi**3))
    gamma = mpf(3) / 2 * gamma0 * ((1 - c2) * sin(xi) / xi
                                  + (1 - 3 * c2) * (cos(xi) / xi**2 - sin(xi) / xi**3))
    return omega, gamma


if __name__ == "__main__":
    cases = [
        ("perp r=0.1", mpf("0.1"), mpf(0)),
        ("perp r=0.05", mpf("0.05"), mpf(0)),
        ("perp r=0.15", mpf("0.15"), mpf(0)),
        ("par r=0.1", mpf("0.1"), mpf(1)),
        ("perp r=100", mpf(100), mpf(0)),
    ]
    for name, r, ca in cases:
        o, g = couplings(r, ca)
        print(f"{name}: omega={mp.nstr(o, 17)} gamma={mp.nstr(g, 17)}")
