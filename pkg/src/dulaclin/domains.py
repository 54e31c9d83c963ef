"""Domain machinery: quadratic domains, bound functions, admissibility checks.

Everything here is sampled verification, not proof: "for x large enough"
conditions are tested on geometric grids and reports carry worst margins so
thresholds stay auditable.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import DomainError, InvalidRho

__all__ = [
    "exp_tower",
    "M_eps_k",
    "rho_minus",
    "rho_plus",
    "M_tail_integral",
    "AsymptoticProfile",
    "iterated_log",
    "iterated_log_real",
    "kappa",
    "kappa_inv",
    "quad_boundary_param",
    "quad_boundary_height",
    "BoundaryMap",
    "power_map",
    "linear_map",
    "log_map",
    "quad_boundary_map",
    "negated",
    "Region",
    "QuadRegion",
    "BandRegion",
    "UnionRegion",
    "region_from_json",
    "region_to_json",
    "in_region",
    "MapCheckReport",
    "check_upper_map",
    "check_lower_map",
    "check_taylor_sufficient",
    "Rect",
    "safety_rect",
    "InvarianceReport",
    "check_invariance",
    "find_invariant_cut",
    "find_contained_quad_constant",
]


def exp_tower(k: int) -> float:
    """exp iterated k times at 0: 0, 1, e, e^e, ..."""
    x = 0.0
    for _ in range(k):
        x = math.exp(x)
    return x


def M_eps_k(x: float, epsilon: float, k: int) -> float:
    """1 / (x * log x * ... * (log^k x)^(1+eps)); for k = 0 this is x^-(1+eps)."""
    if x <= exp_tower(k):
        raise DomainError(f"M undefined at x = {x} for k = {k}")
    v = x
    prod = 1.0
    for _ in range(k):
        prod *= v
        v = math.log(v)
    return 1.0 / (prod * v ** (1.0 + epsilon))


def rho_minus(x: float, beta: complex, epsilon: float, k: int) -> float:
    return beta.real - M_eps_k(x, epsilon, k)


def rho_plus(x: float, beta: complex, epsilon: float, k: int) -> float:
    return beta.real + M_eps_k(x, epsilon, k)


def M_tail_integral(x: float, epsilon: float, k: int) -> float:
    """Closed form of the integral of M over [x, infinity): (log^k x)^-eps / eps.

    Substituting u -> log u peels one factor per level, so the antiderivative
    telescopes down to the k = 0 case.
    """
    if x <= exp_tower(k):
        raise DomainError(f"tail integral undefined at x = {x} for k = {k}")
    v = x
    for _ in range(k):
        v = math.log(v)
    return v ** (-epsilon) / epsilon


def iterated_log_real(x: float, m: int) -> float:
    if x <= exp_tower(m):
        raise DomainError(f"iterated log needs x > exp tower({m}), got {x}")
    for _ in range(m):
        x = math.log(x)
    return x


def iterated_log(zeta: complex, m: int) -> complex:
    """Principal-branch log applied m times; guarded so every intermediate
    stays in the right half plane and |L_m| >= log^m(Re zeta)."""
    if zeta.real <= exp_tower(m):
        raise DomainError(f"iterated log needs Re > exp tower({m}), got {zeta.real}")
    w = zeta
    for _ in range(m):
        w = cmath.log(w)
    return w


@dataclass(frozen=True)
class AsymptoticProfile:
    """Drift data (beta, epsilon, k) and the real-part cut R."""

    beta: complex
    epsilon: float
    k: int
    R: float

    def __post_init__(self):
        if complex(self.beta).real <= 0:
            raise DomainError("profile requires Re(beta) > 0")
        if self.epsilon <= 0:
            raise DomainError("profile requires epsilon > 0")
        if self.k < 0 or int(self.k) != self.k:
            raise DomainError("k must be a nonnegative integer")
        if self.R <= exp_tower(self.k):
            raise DomainError(f"cut R must exceed exp tower({self.k})")
        if self.rho_minus(self.R) <= 0:
            raise DomainError("rho_minus(R) must be positive; raise R")

    def M(self, x: float) -> float:
        return M_eps_k(x, self.epsilon, self.k)

    def M_tail(self, x: float) -> float:
        return M_tail_integral(x, self.epsilon, self.k)

    def rho_minus(self, x: float) -> float:
        return complex(self.beta).real - self.M(x)

    def rho_plus(self, x: float) -> float:
        return complex(self.beta).real + self.M(x)


# ---------------------------------------------------------------------------
# standard quadratic domains

def kappa(w: complex, C: float) -> complex:
    """w + C*sqrt(w + 1), principal square root."""
    return w + C * cmath.sqrt(w + 1.0)


def kappa_inv(zeta: complex, C: float):
    """Closed-form inverse; returns (w, inside) with inside = Re(w) > 0.

    s = sqrt(w+1) solves s^2 + C s - (zeta+1) = 0; the principal-root branch
    s = (-C + sqrt(C^2 + 4(zeta+1)))/2 recovers sqrt(w+1) exactly whenever
    Re(w) > 0, which the round-trip property pins down.
    """
    s = (-C + cmath.sqrt(C * C + 4.0 * (zeta + 1.0))) / 2.0
    w = s * s - 1.0
    return w, w.real > 0


def quad_boundary_param(r: float, C: float) -> complex:
    """Upper boundary point of the quadratic domain at parameter r >= 0.

    x(r) = C (r^2+1)^(1/4) cos(arctan(r)/2),
    y(r) = r + C (r^2+1)^(1/4) sin(arctan(r)/2);  equals kappa(i r).
    """
    if r < 0:
        raise DomainError("parameter r must be nonnegative")
    half = 0.5 * math.atan(r)
    rad = C * (r * r + 1.0) ** 0.25
    return complex(rad * math.cos(half), r + rad * math.sin(half))


def quad_boundary_height(x: float, C: float) -> float:
    """Height of the quadratic-domain boundary above the point x >= C.

    x(r) is strictly increasing from x(0) = C, so bisection is safe.
    """
    if x < C:
        raise DomainError(f"quadratic boundary starts at Re = {C}")
    if x == C:
        return 0.0
    hi = 1.0
    while quad_boundary_param(hi, C).real < x:
        hi *= 2.0
        if hi > 1e18:
            raise DomainError("boundary inversion out of range")
    lo = 0.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if quad_boundary_param(mid, C).real < x:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-14 * max(1.0, hi):
            break
    return quad_boundary_param(0.5 * (lo + hi), C).imag


# ---------------------------------------------------------------------------
# boundary maps

class BoundaryMap:
    """Evaluatable boundary function with declared monotonicity.

    kind is one of power/linear/log/quad/neg; exact derivatives exist for the
    first three (and negations thereof), which is what the Taylor-type
    sufficient conditions need.
    """

    def __init__(self, kind, params, domain_start):
        self.kind = kind
        self.params = params
        self.domain_start = float(domain_start)

    def __call__(self, x: float) -> float:
        k, p = self.kind, self.params
        if k == "power":
            return p["a"] * x ** p["r"]
        if k == "linear":
            return p["a"] * x
        if k == "log":
            if x < 1.0:
                raise DomainError("log map needs x >= 1")
            return math.log(x) ** p["delta"]
        if k == "quad":
            return p["sign"] * quad_boundary_height(x, p["C"])
        if k == "neg":
            return -p["inner"](x)
        raise ValueError(f"unknown boundary map kind {k!r}")

    def monotonicity(self) -> int:
        """+1 increasing, -1 decreasing, 0 constant, on the declared domain."""
        k, p = self.kind, self.params
        if k == "power":
            s = p["a"] * p["r"]
            return (s > 0) - (s < 0)
        if k == "linear":
            return (p["a"] > 0) - (p["a"] < 0)
        if k == "log":
            return 1
        if k == "quad":
            return 1 if p["sign"] > 0 else -1
        if k == "neg":
            return -p["inner"].monotonicity()
        raise ValueError(k)

    def derivative(self, i: int, x: float) -> float:
        """Exact i-th derivative; unavailable for the quad boundary."""
        if i == 0:
            return self(x)
        k, p = self.kind, self.params
        if k == "power":
            a, r = p["a"], p["r"]
            c = a
            for j in range(i):
                c *= r - j
            return c * x ** (r - i)
        if k == "linear":
            return p["a"] if i == 1 else 0.0
        if k == "log":
            # closed under d/dx: terms c * (log x)^s * x^-m
            terms = [(1.0, p["delta"], 0)]
            for _ in range(i):
                nxt = []
                for c, s, m in terms:
                    if s != 0:
                        nxt.append((c * s, s - 1, m + 1))
                    if m != 0:
                        nxt.append((-c * m, s, m + 1))
                terms = nxt
            lx = math.log(x)
            return sum(c * lx ** s * x ** (-m) for c, s, m in terms)
        if k == "neg":
            return -p["inner"].derivative(i, x)
        raise DomainError(f"derivatives unavailable for boundary map kind {k!r}")

    def to_json(self) -> dict:
        k, p = self.kind, self.params
        if k == "power":
            return {"kind": "power", "a": p["a"], "r": p["r"], "t": self.domain_start}
        if k == "linear":
            return {"kind": "linear", "a": p["a"], "t": self.domain_start}
        if k == "log":
            return {"kind": "log", "delta": p["delta"], "t": self.domain_start}
        if k == "quad":
            return {"kind": "quad", "C": p["C"], "sign": p["sign"], "t": self.domain_start}
        if k == "neg":
            return {"kind": "neg", "inner": p["inner"].to_json(), "t": self.domain_start}
        raise ValueError(k)


def power_map(a: float, r: float, t: float = 1.0) -> BoundaryMap:
    return BoundaryMap("power", {"a": a, "r": r}, t)


def linear_map(a: float, t: float = 1.0) -> BoundaryMap:
    return BoundaryMap("linear", {"a": a}, t)


def log_map(delta: float, t: float = 2.0) -> BoundaryMap:
    if delta <= 0:
        raise ValueError("log map needs delta > 0")
    return BoundaryMap("log", {"delta": delta}, max(t, 1.0))


def quad_boundary_map(C: float, sign: int = 1, t: Optional[float] = None) -> BoundaryMap:
    return BoundaryMap("quad", {"C": C, "sign": 1 if sign >= 0 else -1}, C if t is None else t)


def negated(inner: BoundaryMap) -> BoundaryMap:
    return BoundaryMap("neg", {"inner": inner}, inner.domain_start)


def boundary_map_from_json(obj) -> BoundaryMap:
    kind = obj.get("kind")
    t = obj.get("t", 1.0)
    if kind == "power":
        return power_map(obj["a"], obj["r"], t)
    if kind == "linear":
        return linear_map(obj["a"], t)
    if kind == "log":
        return log_map(obj["delta"], t)
    if kind == "quad":
        return quad_boundary_map(obj["C"], obj.get("sign", 1), obj.get("t"))
    if kind == "neg":
        return negated(boundary_map_from_json(obj["inner"]))
    raise ValueError(f"unknown boundary map JSON kind {kind!r}")


# ---------------------------------------------------------------------------
# regions

class Region:
    def contains(self, zeta: complex) -> bool:
        raise NotImplementedError

    def with_cut(self, R: float) -> "Region":
        raise NotImplementedError

    @property
    def cut(self) -> float:
        raise NotImplementedError

    def im_bounds(self, x: float):
        raise NotImplementedError


@dataclass(frozen=True)
class QuadRegion(Region):
    C: float
    R_cut: float = 0.0

    def contains(self, zeta: complex) -> bool:
        if zeta.real < self.R_cut:
            return False
        _, inside = kappa_inv(zeta, self.C)
        return inside

    def with_cut(self, R: float) -> "QuadRegion":
        return QuadRegion(self.C, max(self.R_cut, R))

    @property
    def cut(self) -> float:
        return self.R_cut

    def im_bounds(self, x: float):
        h = quad_boundary_height(x, self.C)
        return -h, h


@dataclass(frozen=True)
class BandRegion(Region):
    """D_{h_l,h_u}: Re >= t and h_l(Re) < Im < h_u(Re)."""

    t: float
    hl: BoundaryMap
    hu: BoundaryMap

    def __post_init__(self):
        for x in np.geomspace(max(self.t, 1e-9), max(self.t * 1e3, 10.0), 64):
            if self.hl(float(x)) >= self.hu(float(x)):
                raise ValueError(f"lower boundary not below upper at x = {x}")

    def contains(self, zeta: complex) -> bool:
        x = zeta.real
        if x < self.t or x <= 0:
            return False
        return self.hl(x) < zeta.imag < self.hu(x)

    def with_cut(self, R: float) -> "BandRegion":
        return BandRegion(max(self.t, R), self.hl, self.hu)

    @property
    def cut(self) -> float:
        return self.t

    def im_bounds(self, x: float):
        return self.hl(x), self.hu(x)


@dataclass(frozen=True)
class UnionRegion(Region):
    parts: tuple

    def contains(self, zeta: complex) -> bool:
        return any(p.contains(zeta) for p in self.parts)

    def with_cut(self, R: float) -> "UnionRegion":
        return UnionRegion(tuple(p.with_cut(R) for p in self.parts))

    @property
    def cut(self) -> float:
        return min(p.cut for p in self.parts)

    def im_bounds(self, x: float):
        los, his = [], []
        for p in self.parts:
            try:
                lo, hi = p.im_bounds(x)
            except DomainError:
                continue
            los.append(lo)
            his.append(hi)
        if not los:
            raise DomainError(f"no union part defined at Re = {x}")
        return min(los), max(his)


def region_from_json(obj) -> Region:
    if "quad" in obj:
        q = obj["quad"]
        return QuadRegion(q["C"], q.get("R", 0.0))
    if "band" in obj:
        b = obj["band"]
        return BandRegion(b["t"], boundary_map_from_json(b["hl"]), boundary_map_from_json(b["hu"]))
    if "union" in obj:
        return UnionRegion(tuple(region_from_json(p) for p in obj["union"]))
    raise ValueError("region JSON must be tagged quad | band | union")


def region_to_json(region: Region) -> dict:
    if isinstance(region, QuadRegion):
        return {"quad": {"C": region.C, "R": region.R_cut}}
    if isinstance(region, BandRegion):
        return {"band": {"t": region.t, "hl": region.hl.to_json(), "hu": region.hu.to_json()}}
    if isinstance(region, UnionRegion):
        return {"union": [region_to_json(p) for p in region.parts]}
    raise ValueError(f"not a region: {region!r}")


def in_region(zeta: complex, region: Region) -> bool:
    return region.contains(zeta)


# ---------------------------------------------------------------------------
# upper/lower boundary-map conditions

@dataclass
class MapCheckReport:
    side: str
    case: str
    passed: bool
    monotone_required: str
    monotone_ok: bool
    n_samples: int
    n_violations: int
    worst_margin: float
    violations: list = field(default_factory=list)


def _sample_grid(t: float, n_samples: int, x_max: float = 1e6):
    lo = max(t, 1e-12)
    hi = max(x_max, lo * 2)
    return [float(v) for v in np.geomspace(lo, hi, n_samples)]


def _monotone_ok(h: BoundaryMap, xs, required: int) -> bool:
    if required == 0:
        return True
    if h.monotonicity() not in (required, 0):
        return False
    vals = [h(x) for x in xs]
    if required > 0:
        return all(b >= a for a, b in zip(vals, vals[1:]))
    return all(b <= a for a, b in zip(vals, vals[1:]))


def _drift_check(h, profile, xs, use_rho_plus, rhs_sign, imb):
    """Margins of  sign * (h(x + rho(x)) - h(x)) >= sign-adjusted bound."""
    margins = []
    for x in xs:
        rho = profile.rho_plus(x) if use_rho_plus else profile.rho_minus(x)
        diff = h(x + rho) - h(x)
        bound = imb + rhs_sign * profile.M(x)
        # upper maps need diff >= bound, lower maps need diff <= bound
        margins.append((x, diff - bound))
    return margins


def _finish_report(side, case, required, mono_ok, margins, flip):
    worst = math.inf
    bad = []
    for x, m in margins:
        signed = -m if flip else m
        worst = min(worst, signed)
        if signed < 0:
            bad.append((x, signed))
    passed = mono_ok and not bad
    return MapCheckReport(
        side=side,
        case=case,
        passed=passed,
        monotone_required={1: "increasing", -1: "decreasing", 0: "any"}[required],
        monotone_ok=mono_ok,
        n_samples=len(margins),
        n_violations=len(bad),
        worst_margin=worst,
        violations=bad[:10],
    )


def check_upper_map(h: BoundaryMap, profile: AsymptoticProfile, n_samples: int = 512,
                    t: Optional[float] = None, x_max: float = 1e6) -> MapCheckReport:
    """Case table by sign of Im(beta); see module docstring for semantics."""
    imb = complex(profile.beta).imag
    t = h.domain_start if t is None else t
    t = max(t, exp_tower(profile.k) + 1e-9)
    xs = _sample_grid(t, n_samples, x_max)
    if imb >= 0:
        mono_ok = _monotone_ok(h, xs, 1)
        margins = _drift_check(h, profile, xs, use_rho_plus=False, rhs_sign=+1, imb=imb)
        return _finish_report("upper", "im>=0", 1, mono_ok, margins, flip=False)
    if h.monotonicity() > 0 and _monotone_ok(h, xs, 1):
        return MapCheckReport("upper", "im<0 increasing", True, "increasing", True,
                              len(xs), 0, math.inf)
    mono_ok = _monotone_ok(h, xs, -1)
    margins = _drift_check(h, profile, xs, use_rho_plus=True, rhs_sign=+1, imb=imb)
    return _finish_report("upper", "im<0 decreasing", -1, mono_ok, margins, flip=False)


def check_lower_map(h: BoundaryMap, profile: AsymptoticProfile, n_samples: int = 512,
                    t: Optional[float] = None, x_max: float = 1e6) -> MapCheckReport:
    imb = complex(profile.beta).imag
    t = h.domain_start if t is None else t
    t = max(t, exp_tower(profile.k) + 1e-9)
    xs = _sample_grid(t, n_samples, x_max)
    if imb > 0:
        if h.monotonicity() < 0 and _monotone_ok(h, xs, -1):
            return MapCheckReport("lower", "im>0 decreasing", True, "decreasing", True,
                                  len(xs), 0, math.inf)
        mono_ok = _monotone_ok(h, xs, 1)
        margins = _drift_check(h, profile, xs, use_rho_plus=True, rhs_sign=-1, imb=imb)
        return _finish_report("lower", "im>0 increasing", 1, mono_ok, margins, flip=True)
    mono_ok = _monotone_ok(h, xs, -1)
    margins = _drift_check(h, profile, xs, use_rho_plus=False, rhs_sign=-1, imb=imb)
    return _finish_report("lower", "im<=0", -1, mono_ok, margins, flip=True)


def check_taylor_sufficient(h: BoundaryMap, n: int, rho: float, profile: AsymptoticProfile,
                            side: str = "upper", t: Optional[float] = None,
                            n_samples: int = 512, x_max: float = 1e6) -> bool:
    """Sampled Taylor sufficient condition for upper/lower maps.

    sum_{i=1}^{n} h^(i)(x) rho^i / i!  compared against Im(beta) +/- M(x);
    the admissible open range of rho depends on the case and is enforced
    strictly.
    """
    if side not in ("upper", "lower"):
        raise ValueError("side must be 'upper' or 'lower'")
    imb = complex(profile.beta).imag
    t = h.domain_start if t is None else t
    t = max(t, exp_tower(profile.k) + 1e-9)
    small_rho = (side == "upper" and imb >= 0) or (side == "lower" and imb <= 0)
    if small_rho:
        limit = profile.rho_minus(t)
        if not 0 < rho < limit:
            raise InvalidRho(f"need 0 < rho < rho_minus(t) = {limit}, got {rho}")
    else:
        limit = profile.rho_plus(t)
        if not rho > limit:
            raise InvalidRho(f"need rho > rho_plus(t) = {limit}, got {rho}")
    xs = _sample_grid(t, n_samples, x_max)
    for x in xs:
        s = 0.0
        rp = 1.0
        for i in range(1, n + 1):
            rp *= rho
            s += h.derivative(i, x) * rp / math.factorial(i)
        if side == "upper":
            if s < imb + profile.M(x):
                return False
        else:
            if s > imb - profile.M(x):
                return False
    return True


# ---------------------------------------------------------------------------
# invariance of regions under hyperbolic maps

@dataclass(frozen=True)
class Rect:
    re_lo: float
    re_hi: float
    im_lo: float
    im_hi: float

    def contains(self, w: complex, slack: float = 1e-12) -> bool:
        return (self.re_lo - slack <= w.real <= self.re_hi + slack
                and self.im_lo - slack <= w.imag <= self.im_hi + slack)


def safety_rect(zeta: complex, profile: AsymptoticProfile) -> Rect:
    """Box guaranteed to contain f(zeta) under the drift hypothesis:
    horizontally [rho_minus, rho_plus] ahead, vertically Im(beta) +/- M."""
    x = zeta.real
    if x < profile.R:
        raise DomainError(f"safety rect needs Re >= R = {profile.R}")
    m = profile.M(x)
    b = complex(profile.beta)
    return Rect(
        re_lo=x + profile.rho_minus(x),
        re_hi=x + profile.rho_plus(x),
        im_lo=zeta.imag + b.imag - m,
        im_hi=zeta.imag + b.imag + m,
    )


def _eq_new_bound(zeta: complex, epsilon: float, k: int) -> float:
    """1 / |zeta * L1 ... L_{k-1} * L_k^(1+eps)| with principal iterated logs."""
    if k == 0:
        return 1.0 / abs(zeta) ** (1.0 + epsilon)
    if zeta.real <= exp_tower(k):
        raise DomainError(f"bound needs Re > exp tower({k}), got {zeta.real}")
    prod = abs(zeta)
    v = zeta
    for m in range(1, k + 1):
        v = cmath.log(v)
        prod *= abs(v) if m < k else abs(v) ** (1.0 + epsilon)
    return 1.0 / prod


@dataclass
class InvarianceReport:
    n_samples: int
    seed: int
    R: float
    n_bound_violations: int
    n_rect_violations: int
    n_region_violations: int
    worst_bound_margin: float
    rows: list = field(default_factory=list)  # (re, im, bound_margin, rect_ok, region_ok)

    @property
    def n_violations(self) -> int:
        return self.n_bound_violations + self.n_rect_violations + self.n_region_violations

    @property
    def passed(self) -> bool:
        return self.n_violations == 0


def check_invariance(f, region: Region, profile: AsymptoticProfile,
                     n_samples: int = 1000, seed: int = 0,
                     re_span: float = 50.0) -> InvarianceReport:
    """Sample stratified points of the cut region and test, for each:
    the modulus drift bound, membership of f(zeta) in the safety rectangle,
    and membership of f(zeta) in the region itself.

    `f` is an AnalyticMap-like object: callable, with `.delta(zeta)` for the
    drift and `.profile` matching the supplied profile.
    """
    R = max(profile.R, region.cut)
    cut_region = region.with_cut(R)
    if isinstance(region, QuadRegion) and R <= region.C:
        raise DomainError("cut must exceed the quadratic-domain constant C")
    rng = np.random.default_rng(seed)
    n_strata = max(1, min(64, n_samples))
    parts = region.parts if isinstance(region, UnionRegion) else (region,)
    rows = []
    nb = nr = ng = 0
    worst = math.inf
    for j in range(n_samples):
        u1, u2 = rng.random(), rng.random()
        x = R + re_span * ((j % n_strata) + u1) / n_strata
        lo, hi = parts[j % len(parts)].im_bounds(x)
        y = lo + (hi - lo) * u2
        zeta = complex(x, y)
        if not cut_region.contains(zeta):
            # boundary-exact draws; resample toward the centerline
            y = 0.5 * (lo + hi)
            zeta = complex(x, y)
        w = f(zeta)
        d = f.delta(zeta)
        margin = _eq_new_bound(zeta, profile.epsilon, profile.k) - abs(d)
        rect_ok = safety_rect(zeta, profile).contains(w)
        region_ok = cut_region.contains(w)
        worst = min(worst, margin)
        nb += margin < 0
        nr += not rect_ok
        ng += not region_ok
        rows.append((x, y, margin, rect_ok, region_ok))
    return InvarianceReport(
        n_samples=n_samples,
        seed=seed,
        R=R,
        n_bound_violations=nb,
        n_rect_violations=nr,
        n_region_violations=ng,
        worst_bound_margin=worst,
        rows=rows,
    )


def find_invariant_cut(f, region: Region, profile: AsymptoticProfile,
                       n_samples: int = 2000, seed: int = 0,
                       max_doublings: int = 24):
    """Geometric search for a cut R making the sampled invariance checks pass.

    Returns (R, report) for the first passing cut; raises DomainError if the
    search exhausts its doublings.
    """
    R = profile.R
    if isinstance(region, QuadRegion):
        R = max(R, region.C + 1.0)
    for _ in range(max_doublings):
        prof = AsymptoticProfile(profile.beta, profile.epsilon, profile.k, R)
        report = check_invariance(f, region, prof, n_samples=n_samples, seed=seed)
        if report.passed:
            return R, report
        R *= 2.0
    raise DomainError(f"no invariant cut found up to R = {R}")


def find_contained_quad_constant(C: float, R: float, n_samples: int = 400,
                                 seed: int = 0, max_doublings: int = 20) -> float:
    """Search upward for C' with every sampled point of the C'-domain inside
    the cut domain (R_C)_R."""
    outer = QuadRegion(C, R)
    rng = np.random.default_rng(seed)
    ws = [complex(100.0 * rng.random() + 1e-6, 200.0 * rng.random() - 100.0)
          for _ in range(n_samples)]
    Cp = max(C, R) + 1.0
    for _ in range(max_doublings):
        if all(outer.contains(kappa(w, Cp)) for w in ws):
            return Cp
        Cp *= 2.0
    raise DomainError(f"no contained subdomain constant found up to C' = {Cp}")
