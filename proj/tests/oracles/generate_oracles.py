"""Reference values computed with mpmath at 40 digits, frozen into oracles.hpp.

Run: python3 generate_oracles.py > oracles.hpp
"""
import mpmath as mp

mp.mp.dps = 40


def root(V, L, m):
    V, L = mp.mpf(V), mp.mpf(L)
    lo = (2 * m - 1) * mp.pi / L
    hi = 2 * m * mp.pi / L
    # 2 k cos(kL/2) + V sin(kL/2) = 0, bisection on the closed bracket
    g = lambda k: 2 * k * mp.cos(k * L / 2) + V * mp.sin(k * L / 2)
    glo = g(lo)
    for _ in range(400):
        mid = (lo + hi) / 2
        if mp.sign(g(mid)) == mp.sign(glo):
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2


def eps(L, V0, Vmax, k0):
    return (Vmax - V0) / (L * k0**2 + V0 * (1 + V0 * L / 4))


def ramp_coeff(r, j):
    # (2/T) int_0^T f(t) e^{-i j w t} dt with T = 1, by quadrature
    f = lambda t: t / r if t <= r else (1 - t) / (1 - r)
    w = 2 * mp.pi * j
    re = 2 * (mp.quad(lambda t: f(t) * mp.cos(w * t), [0, r]) + mp.quad(lambda t: f(t) * mp.cos(w * t), [r, 1]))
    im = -2 * (mp.quad(lambda t: f(t) * mp.sin(w * t), [0, r]) + mp.quad(lambda t: f(t) * mp.sin(w * t), [r, 1]))
    return mp.sqrt(re**2 + im**2), mp.atan2(im, re)


def psi(k, L, x):
    n = mp.sqrt(2 / L)
    return n * mp.sin(k * x) if x <= L / 2 else -n * mp.sin(k * (x - L))


def dpsi(k, L, x):
    n = mp.sqrt(2 / L)
    return n * x * mp.cos(k * x) if x <= L / 2 else -n * (x - L) * mp.cos(k * (x - L))


def d2psi(k, L, x):
    n = mp.sqrt(2 / L)
    return -n * x**2 * mp.sin(k * x) if x <= L / 2 else n * (x - L) ** 2 * mp.sin(k * (x - L))


def overlap(fa, ka, fb, kb, L):
    h = L / 2
    return mp.quad(lambda x: fa(ka, L, x) * fb(kb, L, x), [0, h]) + mp.quad(
        lambda x: fa(ka, L, x) * fb(kb, L, x), [h, L])


def norm(k, L):
    return 1 - mp.sin(k * L) / (k * L)


out = []
emit = lambda name, v: out.append(f"inline constexpr double {name} = {mp.nstr(v, 20)};")

emit("kRootV1e13Lx1e2", root(1e13, 1e-2, 1))
k10 = root(1e10, 1e-2, 1)
emit("kRootV1e10Lx1e2", k10)
emit("kEpsV1e10", eps(mp.mpf("1e-2"), mp.mpf(10) ** 10, mp.mpf(10) ** 16, k10))
k13 = root(1e13, 1e-2, 1)
emit("kEpsV1e13", eps(mp.mpf("1e-2"), mp.mpf(10) ** 13, mp.mpf(10) ** 16, k13))
L48 = mp.mpf("4.8")
V48 = 10 / L48
for m in range(1, 6):
    emit(f"kRootL48m{m}", root(V48, L48, m))
emit("kRootV3L1m2", root(3, 1, 2))
emit("kRootV1e3L2m4", root(1e3, 2, 4))

for r, j in [("0.1", 1), ("0.1", 3), ("0.25", 2), ("0.37", 5), ("0.05", 7)]:
    fj, cj = ramp_coeff(mp.mpf(r), j)
    tag = r.replace("0.", "r")
    emit(f"kRampAmp_{tag}_j{j}", fj)
    emit(f"kRampPhase_{tag}_j{j}", cj)

# Coupling at Lx = 4.8, V = 10/4.8 and at Lx = 1e-2, V = 1e12.
for tag, L, V in [("L48", L48, V48), ("L1", mp.mpf(1), mp.mpf(7))]:
    ks = [root(V, L, m) for m in range(1, 4)]
    for a in range(3):
        emit(f"kNorm_{tag}_{a + 1}", norm(ks[a], L))
        for b in range(3):
            emit(f"kGA_{tag}_{a + 1}{b + 1}", overlap(dpsi, ks[a], psi, ks[b], L) / norm(ks[b], L))
            emit(f"kGB_{tag}_{a + 1}{b + 1}", overlap(d2psi, ks[a], psi, ks[b], L) / norm(ks[b], L))

print("#pragma once")
print("")
print("// Generated by generate_oracles.py (mpmath, 40 digits). Do not edit.")
print("namespace oracle {")
print("")
print("\n".join(out))
print("")
print("}  // namespace oracle")
