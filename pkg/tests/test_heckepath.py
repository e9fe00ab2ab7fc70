from fractions import Fraction as Fr

import pytest

from masurelab.galleries import segment_count, CountPoly
from masurelab.heckepath import (
    BoundExceeded,
    NotLambdaPath,
    PiecewisePath,
    Superdecoration,
    build_path,
    crossing_bound,
    crossing_events,
    decorate,
    folding_measure,
    superdecorate,
    validate_superdecoration,
    verify_hecke,
)
from masurelab.rootgeom import Point, WeylElt

LAM = (0, -1)
R2, R5 = WeylElt(-1, -3), WeylElt(-1, -6)


def example_path():
    return build_path(LAM, [(Fr(2, 3), "e"), (Fr(1, 6), R2), (Fr(1, 18), R2 * R5), (Fr(1, 9), R5)])


def test_vertices_exact():
    p = example_path()
    assert [(v.x, v.y) for v in p.vertices] == [
        (0, 0), (0, Fr(-2, 3)), (1, Fr(-5, 6)), (Fr(2, 3), Fr(-8, 9)), (2, -1)
    ]
    assert p.fold_times() == [Fr(2, 3), Fr(5, 6), Fr(8, 9)]


def test_straight_path_passes():
    rep = verify_hecke(build_path(LAM, [(1, "e")]))
    assert rep.ok and rep.folds == []


def test_fold_off_thick_walls_fails():
    # fold at (0, -1/2): no thick wall x = h*y + m through it except h = 0... reflect by r1 direction change
    path = build_path(LAM, [(Fr(1, 2), "e"), (Fr(1, 2), WeylElt(-1, -1))])
    assert verify_hecke(path).ok is False


def test_example_chains_and_count():
    path = example_path()
    rep = verify_hecke(path)
    assert rep.ok
    assert [str(r) for f in rep.folds for r in f.chain.roots] == ["-ℵ-3δ", "ℵ", "-ℵ-3δ"]
    d = decorate(path)
    sd = superdecorate(d)
    assert validate_superdecoration(sd).ok
    assert segment_count(sd) == CountPoly(5, 3)
    assert folding_measure(path, d).ok


def test_bound_exceeded():
    path = example_path()
    need = crossing_bound(path)
    with pytest.raises(BoundExceeded):
        crossing_events(path, need - 1)
    assert crossing_events(path, need) == crossing_events(path, need + 5)


def test_not_lambda_path():
    with pytest.raises(NotLambdaPath):
        build_path(LAM, [(Fr(1, 2), "e")])
    with pytest.raises(NotLambdaPath):
        build_path(LAM, [(1, (1, -1))])


def test_json_roundtrip():
    path = example_path()
    assert PiecewisePath.from_json(path.to_json()).vertices == path.vertices
    sd = superdecorate(decorate(path))
    sd2 = Superdecoration.from_json(sd.to_json())
    assert validate_superdecoration(sd2).ok
    assert segment_count(sd2) == segment_count(sd)


def test_superdecoration_tamper_detected():
    path = example_path()
    sd = superdecorate(decorate(path))
    d = sd.to_json()
    d["points"][1]["c_plus"]["index"] += 1
    assert not validate_superdecoration(Superdecoration.from_json(d)).ok
