import random
from fractions import Fraction as F

import pytest

from dulaclin.series import CPoly, ExpPolySeries, semigroup_points

GEN_CHOICES = [
    (F(1),),
    (F(1, 2),),
    (F(2, 3),),
    (F(1), F(1, 2)),
    (F(1, 2), F(2, 3)),
    (F(1), F(1, 2), F(2, 3)),
]
ORDER_CHOICES = [F(1), F(3, 2), F(2), F(2), F(5, 2), F(3), F(3), F(4)]


def random_hyperbolic_series(rng: random.Random, real: bool = False) -> ExpPolySeries:
    """Random hyperbolic series: generators within {1, 1/2, 2/3}, order <= 4,
    Re(beta) in [0.3, 3], |Im(beta)| <= 10, blocks of degree <= 3."""
    gens = rng.choice(GEN_CHOICES)
    N = rng.choice(ORDER_CHOICES)
    pts = sorted(p for p in semigroup_points(gens, N) if p > 0) or [F(1)]
    if real:
        beta = complex(0.3 + 2.7 * rng.random(), 0.0)
    else:
        beta = complex(0.3 + 2.7 * rng.random(), -10 + 20 * rng.random())
    terms = {F(0): CPoly([beta, 1.0])}
    for mu in rng.sample(pts, rng.randint(1, min(3, len(pts)))):
        deg = rng.randint(0, 3)
        coeffs = [complex(rng.uniform(-2, 2), 0.0 if real else rng.uniform(-2, 2))
                  for _ in range(deg + 1)]
        terms[mu] = CPoly(coeffs)
    return ExpPolySeries(N, gens, terms)


def max_rel_coeff_diff(a: ExpPolySeries, b: ExpPolySeries) -> float:
    worst = 0.0
    for m in set(a.support()) | set(b.support()):
        pa, pb = a.block(m), b.block(m)
        for d in range(max(pa.degree, pb.degree) + 1):
            x, y = pa.coeff(d), pb.coeff(d)
            worst = max(worst, abs(x - y) / max(1.0, abs(x), abs(y)))
    return worst


@pytest.fixture
def rng():
    return random.Random(20260808)
