"""Parameter recipes at scales far beyond enumeration.

Everything is log2-domain arithmetic, so targets like 2^-(10^12) are fine.
"""
from fractions import Fraction

from walkcodes.errors import Infeasible
from walkcodes.params import gamma, rate_report, round_four_radius, round_three, round_two, thresholds

alpha = Fraction(1, 128)
x_min = 4 * 7 * 128 ** 5
print(f"smallest feasible log2(1/eps) at s = 128: {x_min:.3e}")
print("   log2(1/eps)        t     log2 N    rate exponent  bound   ok")
for x in (x_min, 10 * x_min, 10 ** 12, 10 ** 15):
    p = gamma(64, x, alpha)
    r = rate_report(p)
    print(f"{x:14.3e} {p.t:10d} {p.log2_N:10.4e} {r['rate_exponent']:10.5f} {r['bound']:8.5f}  {r['ok']}")

try:
    gamma(64, 10 ** 6, alpha)
except Infeasible as exc:
    print(f"\n2^-(10^6) at s = 128: {exc}")

p2 = round_two(64, 10 ** 12, alpha)
print(f"\nround II at 2^-(10^12): ell = {p2.ell}, P = {p2.P}, t' = {p2.t_prime}, rate exponent {p2.rate_exponent:.5f}")
p3 = round_three(64, 10 ** 12)
print(f"round III picks s = {p3.s}")
r4 = round_four_radius(p3.s)
print(f"round IV radius at s = {p3.s}: eta = 2^{r4['log2_eta']:.1f}")
th = thresholds(Fraction(1, 100), 35)
print(f"thresholds at eta = 1/100: k0 = {th.k0:.2f}, k0' = {th.k0_prime:.1f}")
