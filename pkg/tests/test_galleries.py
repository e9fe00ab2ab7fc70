import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from masurelab.galleries import (
    CountPoly,
    Gallery,
    NotCentrifugal,
    Step,
    TooLarge,
    brute_force_liftings,
    count_liftings_poly,
    find_centrifugal_gallery,
    is_centrifugal,
    minimal_gallery_type,
    random_centrifugal_gallery,
)
from masurelab.rootgeom import LocalChamber, Point


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_closed_form_matches_enumeration(seed):
    g, c = random_centrifugal_gallery(random.Random(seed))
    poly = count_liftings_poly(g, c)
    for q in (2, 3):
        assert poly.eval(q) == brute_force_liftings(g, c, q)


def test_count_poly_algebra():
    a, b = CountPoly(2, 1), CountPoly(1, 3)
    assert a * b == CountPoly(3, 4)
    assert str(CountPoly()) == "1"
    assert CountPoly(3, 2).eval(4) == 64 * 9
    with pytest.raises(ValueError):
        CountPoly(-1, 0)


def test_empty_gallery_counts_one():
    g = Gallery(1, 0, ())
    assert count_liftings_poly(g, LocalChamber.at(Point(0, 0), 1, 0)) == CountPoly()
    assert brute_force_liftings(g, LocalChamber.at(Point(0, 0), 1, 0), 3) == 1


def test_fold_toward_centre_rejected():
    center = LocalChamber.at(Point(0, 0), 1, 0)
    # chamber 1 and the centre lie on the same side of wall 2: folding there turns back toward the centre
    g = Gallery(1, 1, (Step(2, True, True),))
    assert is_centrifugal(g, center) is False
    with pytest.raises(NotCentrifugal):
        count_liftings_poly(g, center)
    # wall 1 separates chamber 1 from the centre: folding there is centrifugal
    g2 = Gallery(1, 1, (Step(1, True, True),))
    assert is_centrifugal(g2, center)
    assert count_liftings_poly(g2, center) == CountPoly(0, 1)


def test_inconsistent_thickness_rejected():
    with pytest.raises(ValueError):
        Gallery(1, 0, (Step(1, False, False), Step(1, True, True)))


def test_oracle_limits():
    g = Gallery(1, 0, ())
    c = LocalChamber.at(Point(0, 0), 1, 0)
    with pytest.raises(TooLarge):
        brute_force_liftings(g, c, 8)


def test_gallery_search_follows_type():
    p = Point(0, 0)
    cinf = LocalChamber.at(p, -1, 0)
    target = LocalChamber.at(p, -1, 3)
    typ = minimal_gallery_type(cinf, target)
    assert typ.is_reduced() and len(typ) == 3
    g = find_centrifugal_gallery(p, -1, 0, typ.letters, 3, LocalChamber.at(p, 1, 0))
    assert g is not None and g.end == 3 and not any(s.fold for s in g.steps)
