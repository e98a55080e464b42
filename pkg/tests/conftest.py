import random

import pytest

from difftrap import DiffPresentation, OPAQUE, parse_expr
from difftrap.poly import Poly
from difftrap.rational import RationalElement


def presentation(name, p, images, m=1):
    """Build a presentation from {var: expr-string or None (opaque)} maps.

    ``images`` is a single map for m = 1 or a list of maps otherwise.
    """
    if isinstance(images, dict):
        images = [images]
    variables = list(images[0])
    varset = set(variables)
    resolved = []
    for imap in images:
        resolved.append(
            {
                v: (OPAQUE if s is None else parse_expr(s, p, varset))
                for v, s in imap.items()
            }
        )
    return DiffPresentation(name, p, m, variables, resolved)


def random_poly(rng, p, variables, max_degree=6, max_terms=4):
    terms = {}
    for _ in range(rng.randint(1, max_terms)):
        mono = []
        budget = max_degree
        for v in variables:
            e = rng.randint(0, budget)
            budget -= e
            if e:
                mono.append((v, e))
        coeff = rng.randint(0, p - 1)
        if coeff:
            terms[tuple(sorted(mono))] = coeff
    return Poly(p, terms)


def random_element(rng, p, variables, max_degree=6, allow_denominator=True):
    num = random_poly(rng, p, variables, max_degree)
    if not allow_denominator or rng.random() < 0.4:
        return RationalElement(num)
    den = random_poly(rng, p, variables, max_degree)
    while den.is_zero():
        den = random_poly(rng, p, variables, max_degree)
    return RationalElement(num, den)


@pytest.fixture
def rng():
    return random.Random(20260809)
