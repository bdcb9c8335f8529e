"""Parameter recipes for the walk-based construction, carried out in log2 domain.

Target biases are passed as ``log2_inv_eps`` (x with eps = 2^-x) so that values
like 2^-(10^12) stay representable.  Quantities built from powers of s are
exact integers; logarithms of non-powers of two are floats.

Two modes:
``paper``  enforces s >= 128 and raises :class:`Infeasible` on any failed gate;
``desk``   accepts any s >= 2 and records gate verdicts instead of raising.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field, replace
from fractions import Fraction

from .errors import BadAlpha, Infeasible

PAPER_MIN_S = 128
K_DEFAULT = 2 ** 30
K_PRIME_DEFAULT = 2 ** 30


@dataclass(frozen=True)
class ParamSet:
    alpha: Fraction
    s: int
    Q: int = 1
    t: int | None = None
    D: int | None = None
    log2_inv_eps: float | None = None
    mode: str = "desk"
    recipe: str = "I"
    log2_d2: int | None = None
    b2: int | None = None
    log2_lambda2: float | None = None
    log2_eps0: int | None = None
    log2_theta: float | None = None
    log2_d1: int | None = None
    log2_lambda1_bound: float | None = None
    base_code_exponent: float = 2.0
    log2_n: float | None = None
    log2_N: float | None = None
    rate_exponent: float | None = None
    rate_exponent_bound: float | None = None
    ell: int | None = None
    zeta_ratio: Fraction | None = None
    P: int | None = None
    t_prime: int | None = None
    gates: dict = field(default_factory=dict)
    notes: tuple = ()

    def report(self) -> dict:
        out = asdict(self)
        out.pop("gates")
        out.update({f"gate_{k}": v for k, v in self.gates.items()})
        return out


def _check_alpha(alpha, mode: str) -> tuple[Fraction, int]:
    alpha = Fraction(alpha)
    if alpha <= 0 or alpha.numerator != 1:
        raise BadAlpha(f"alpha = {alpha} is not 1/s")
    s = alpha.denominator
    if s < 2 or s & (s - 1):
        raise BadAlpha(f"1/alpha = {s} is not a power of two >= 2")
    if mode == "paper" and s < PAPER_MIN_S:
        raise BadAlpha(f"paper mode needs alpha <= 1/{PAPER_MIN_S}")
    return alpha, s


def alpha_feasible(alpha, log2_inv_eps, mode: str = "paper") -> bool:
    """alpha^5 / (4 log2(1/alpha)) >= 1 / log2(1/eps), evaluated exactly."""
    alpha, s = _check_alpha(alpha, mode)
    log_s = s.bit_length() - 1
    return Fraction(log2_inv_eps) * alpha ** 5 >= 4 * log_s


def _fill_graph_parameters(s: int, Q: int) -> dict:
    log_s = s.bit_length() - 1
    log2_d2 = 4 * s * s * Q * log_s
    b2 = 4 * s * log2_d2
    log2_lambda2 = math.log2(b2) - log2_d2 / 2
    log2_d1 = 4 * log2_d2
    return dict(
        log2_d2=log2_d2,
        b2=b2,
        log2_lambda2=log2_lambda2,
        log2_eps0=-2 * log2_d2,
        log2_theta=4 * log2_lambda2 - math.log2(6),
        log2_d1=log2_d1,
        log2_lambda1_bound=1.5 - log2_d1 / 2,
    )


def _smallest_steps(log2_lambda2: float, factor: float, x: float) -> int:
    """Smallest integer m >= 1 with (lambda2^2)^(factor * m) <= 2^-x."""
    if log2_lambda2 >= 0 or factor <= 0:
        raise Infeasible("lambda2 >= 1 or no decay per step, walks never reach the target bias")
    m = max(1, math.ceil(x / (-2 * log2_lambda2 * factor) * (1 - 1e-12)))
    while 2 * log2_lambda2 * factor * m > -x:
        m += 1
    while m > 1 and 2 * log2_lambda2 * factor * (m - 1) <= -x:
        m -= 1
    return m


def _gate(p_gates: dict, name: str, ok: bool, mode: str, message: str):
    p_gates[name] = bool(ok)
    if not ok and mode == "paper":
        raise Infeasible(message)


def gamma(D: int, log2_inv_eps, alpha, Q: int = 1, mode: str = "paper",
          round_two_factor: bool = False, base_code_exponent: float = 2.0) -> ParamSet:
    """Fill every parameter for dimension D, target bias 2^-x and width 1/alpha."""
    alpha, s = _check_alpha(alpha, mode)
    x = float(log2_inv_eps)
    gates: dict = {}
    _gate(gates, "alpha_feasible", alpha_feasible(alpha, log2_inv_eps, mode), mode,
          f"alpha = {alpha} is not feasible for log2(1/eps) = {log2_inv_eps}")
    g = _fill_graph_parameters(s, Q)
    a = float(alpha)
    factor = (1 - 5 * a) * (1 - a) * ((1 - 2 * a) if round_two_factor else 1.0)
    recipe = "II-pre" if round_two_factor else "I"
    log2_n = math.log2(D) + base_code_exponent * (-g["log2_eps0"])
    common = dict(alpha=alpha, s=s, Q=Q, D=D, log2_inv_eps=log2_inv_eps, mode=mode, recipe=recipe,
                  base_code_exponent=base_code_exponent, log2_n=log2_n, **g)
    _gate(gates, "walk_factor_positive", factor > 0, mode,
          f"alpha = {alpha} leaves no bias decay per step (needs alpha < 1/5)")
    if factor <= 0:
        return ParamSet(gates=gates, notes=("walk length undefined for alpha >= 1/5",), **common)
    steps = _smallest_steps(g["log2_lambda2"], factor, x)
    t = steps + 1
    _gate(gates, "walk_length_at_least_s_squared", steps >= s * s, mode,
          f"t - 1 = {steps} is below s/alpha = {s * s}")
    gates["bias_reached"] = 2 * g["log2_lambda2"] * factor * steps <= -x
    gates["bias_tight"] = 2 * g["log2_lambda2"] * factor * (1 - a) * steps >= -x
    walk_bits = s * g["log2_d1"] + 2 * steps * g["log2_d2"]
    return ParamSet(
        t=t,
        log2_N=log2_n + walk_bits,
        rate_exponent=walk_bits / x,
        rate_exponent_bound=2 + 26 * a,
        gates=gates,
        **common,
    )


def block_length_bits(p: ParamSet) -> float:
    """log2 N = log2 n' + s log2 d1 + 2 (t - 1) log2 d2 with n' = n."""
    return p.log2_n + p.s * p.log2_d1 + 2 * (p.t - 1) * p.log2_d2


def rate_report(p: ParamSet, log2_inv_eps=None) -> dict:
    x = float(p.log2_inv_eps if log2_inv_eps is None else log2_inv_eps)
    a = float(p.alpha)
    steps = p.t - 1
    walk_bits = p.s * p.log2_d1 + 2 * steps * p.log2_d2
    checks = {
        "walk_degree_vs_bias": 2 * steps * p.log2_d2 <= 2 * (1 + 10 * a) * x * (1 + 1e-12),
        "inner_spectrum": (1 - 2 * a) * p.log2_d2 <= -2 * p.log2_lambda2,
        "cloud_absorbed": p.s * p.log2_d1 <= 4 * a * steps * p.log2_d2,
        "rate_exponent": walk_bits / x <= (2 + 26 * a) * (1 + 1e-12),
    }
    return {"rate_exponent": walk_bits / x, "bound": 2 + 26 * a, "checks": checks,
            "ok": all(checks.values())}


def rate_certify(p: ParamSet, log2_inv_eps=None) -> bool:
    return rate_report(p, log2_inv_eps)["ok"]


def round_two_adjust(p: ParamSet) -> ParamSet:
    """Round the walk length up to P * s^(ell-1) so the cascade closes exactly."""
    s, Q, t = p.s, p.Q, p.t
    if t is None or t <= s:
        raise Infeasible(f"t = {t} must exceed s = {s}")
    ell = 1
    while s ** ell < t:
        ell += 1
    alpha = Fraction(1, s)
    if s ** ell == t:
        # walks already close the cascade: keep the first graph parameters as they are
        return replace(p, ell=ell, zeta_ratio=Fraction(s), P=s, t_prime=t, recipe="II",
                       notes=p.notes + ("t is a power of s; no top-level adjustment",))
    zeta = Fraction(t, s ** (ell - 1))
    P = math.ceil(zeta * Q)
    if not (Q <= P <= s * Q and 0 <= Fraction(P, Q) - zeta <= Fraction(1, Q)):
        raise Infeasible(f"no integer P in [{Q}, {s * Q}] within 1/Q above {zeta}")
    t_prime = P * s ** (ell - 1)
    scaled = Fraction(t_prime - 1, Q)
    if not (t - 1 <= scaled <= (1 + 2 * alpha) * (t - 1)):
        raise Infeasible(f"walk length sandwich fails: {t - 1} <= {scaled} <= {(1 + 2 * alpha) * (t - 1)}")
    gates = dict(p.gates)
    gates["walk_length_sandwich"] = True
    notes = list(p.notes)
    fields = dict(ell=ell, zeta_ratio=zeta, P=P, t_prime=t_prime, recipe="II", gates=gates)
    if p.log2_inv_eps is not None and p.log2_lambda2 is not None:
        x = float(p.log2_inv_eps)
        a = float(alpha)
        final = _fill_graph_parameters(s, 1)
        gates["lambda_power"] = Q * final["log2_lambda2"] <= (1 - 2 * a) * p.log2_lambda2 + 1e-9
        walk_bits = s * final["log2_d1"] + 2 * (t_prime - 1) * final["log2_d2"]
        exponent = walk_bits / x
        bias_bits = 2 * final["log2_lambda2"] * (1 - 5 * a) * (1 - a) * (t_prime - 1)
        gates["final_bias"] = bias_bits <= -x
        _gate(gates, "final_rate", exponent <= (2 + 40 * a) * (1 + 1e-12), p.mode,
              f"final rate exponent {exponent} exceeds 2 + 40 alpha")
        notes.append("final code uses the Q = 1 graph parameters")
        fields.update(log2_N=p.log2_n + walk_bits, rate_exponent=exponent,
                      rate_exponent_bound=2 + 40 * a, notes=tuple(notes), **final)
    return replace(p, **fields)


def round_two(D: int, log2_inv_eps, alpha, mode: str = "paper", base_code_exponent: float = 2.0) -> ParamSet:
    alpha, s = _check_alpha(alpha, mode)
    pre = gamma(D, log2_inv_eps, alpha, Q=s, mode=mode, round_two_factor=True,
                base_code_exponent=base_code_exponent)
    return round_two_adjust(pre)


def width_for(log2_inv_eps, c: float = 1.0) -> int:
    """Smallest power of two s with s >= c * (log2(1/eps))^(1/6)."""
    x = Fraction(log2_inv_eps)
    c = Fraction(c)
    s = 1
    while Fraction(s) ** 6 < c ** 6 * x:
        s *= 2
    return s


def round_three(D: int, log2_inv_eps, c: float = 1.0, mode: str = "paper") -> ParamSet:
    s = width_for(log2_inv_eps, c)
    minimum = PAPER_MIN_S if mode == "paper" else 2
    if s < minimum:
        raise Infeasible(f"s = {s} is below the {mode}-mode minimum {minimum}")
    p = round_two(D, log2_inv_eps, Fraction(1, s), mode, base_code_exponent=2.001)
    notes = p.notes + ("base code C0 comes from a Round II construction",
                       f"s constant c = {c}", f"beta = 26 alpha = {Fraction(26, s)}")
    return replace(p, recipe="III", notes=notes)


def round_four_constraints(s: int, x: float, c: float = 1.0) -> bool:
    """eta = 2^-x: x <= c s and eta^8 / (s^2 2^(2 s^2)) >= 2 s^(-s^2)."""
    log_s = math.log2(s)
    return x <= c * s and -8 * x - 2 * log_s - 2 * s * s >= 1 - s * s * log_s


def round_four_radius(s: int, c: float = 1.0) -> dict:
    """Smallest eta = 2^-x (largest x) meeting both constraints, by bisection on x."""
    if s < 4:
        raise Infeasible("s must be at least 4")
    if not round_four_constraints(s, 0.0, c):
        raise Infeasible(f"no eta < 1 satisfies the constraints at s = {s}")
    lo, hi = 0.0, c * s
    if round_four_constraints(s, hi, c):
        lo = hi
    else:
        for _ in range(200):
            mid = (lo + hi) / 2
            if round_four_constraints(s, mid, c):
                lo = mid
            else:
                hi = mid
    if lo <= 0:
        raise Infeasible(f"no eta < 1 satisfies the constraints at s = {s}")
    return {"s": s, "log2_eta": -lo, "eta": 2.0 ** -lo, "radius": 0.5 - 2.0 ** (-lo / 2), "c": c}


@dataclass(frozen=True)
class ThresholdSet:
    k0: float
    k0_prime: float
    log2_tau0: float
    log2_L: float
    K: int
    K_prime: int
    s: int
    s_gate: bool


def thresholds(eta, k: int, s: int | None = None, K: int = K_DEFAULT, K_prime: int = K_PRIME_DEFAULT) -> ThresholdSet:
    eta = float(eta)
    if not 0 < eta < 1:
        raise Infeasible("eta must lie in (0, 1)")
    s = k if s is None else s
    log_inv = math.log(1 / eta)
    log2_eta = math.log2(eta)
    gate_lhs = 2 * math.log2(s) - s * s * (math.log2(s) - 4)
    gate_rhs = 8 * log2_eta - 2 - math.log2(K)
    return ThresholdSet(
        k0=2 * (1 + log_inv / math.log(4 / 3)),
        k0_prime=2 * (1 + log_inv / math.log(16 / 15)),
        log2_tau0=8 * log2_eta - math.log2(K) - math.log2(k) - 4 * k,
        log2_L=math.log2(K_prime) + 4 * math.log2(k) + 4 * k - 32 * log2_eta,
        K=K, K_prime=K_prime, s=s, s_gate=gate_lhs <= gate_rhs,
    )
