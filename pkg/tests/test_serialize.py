"""Canonical JSON/CSV round trips and byte determinism."""
import io
from fractions import Fraction

import pytest

from turnpike.core import AssignmentMatrix, DistanceMultiset, PointSet
from turnpike.metrics import ground_truth
from turnpike.serialize import (
    dumps_assignment,
    dumps_instance,
    dumps_result,
    loads_assignment,
    loads_instance,
    num_token,
    write_csv,
)


# -- instance documents -------------------------------------------------------

def test_instance_round_trip(multiset_0259, points_0259):
    text = dumps_instance(multiset_0259, ground_truth=points_0259)
    Y, gt, scale = loads_instance(text)
    assert Y == multiset_0259
    assert gt.coords == points_0259.coords
    assert scale is None


def test_instance_bytes_deterministic(multiset_0246):
    a = dumps_instance(multiset_0246)
    b = dumps_instance(DistanceMultiset((6, 4, 2), (1, 2, 3)))
    assert a == b
    assert a == loads_and_redump(a)


def loads_and_redump(text):
    Y, gt, scale = loads_instance(text)
    return dumps_instance(Y, scale=scale, ground_truth=gt)


def test_instance_scale_snaps_to_grid():
    text = '{"n": 3, "values": [4.0, 2.5, 1.5], "multiplicities": [1, 1, 1], "scale": 0.5}'
    Y, gt, scale = loads_instance(text)
    assert Y.values == (4, Fraction(5, 2), Fraction(3, 2))
    assert all(isinstance(v, (int, Fraction)) for v in Y.values)
    assert scale == Fraction(1, 2)


def test_instance_off_grid_value_rejected():
    text = '{"n": 3, "values": [4.0, 2.51, 1.5], "multiplicities": [1, 1, 1], "scale": 0.5}'
    with pytest.raises(ValueError):
        loads_instance(text)


def test_instance_without_scale_decimals_load_as_floats():
    text = '{"n": 3, "values": [4.25, 2.5, 1.5], "multiplicities": [1, 1, 1]}'
    Y, _, _ = loads_instance(text)
    assert Y.values == (4.25, 2.5, 1.5)
    assert isinstance(Y.values[0], float)


def test_instance_integer_literals_stay_exact():
    text = '{"n": 4, "values": [6, 4, 2], "multiplicities": [1, 2, 3]}'
    Y, _, _ = loads_instance(text)
    assert all(isinstance(v, int) for v in Y.values)


def test_instance_validation_errors():
    with pytest.raises(ValueError):
        loads_instance('{"values": [2], "multiplicities": [1]}')  # n missing
    with pytest.raises(ValueError):  # total multiplicity 3 but n=4 needs 6
        loads_instance('{"n": 4, "values": [6, 4, 2], "multiplicities": [1, 1, 1]}')
    with pytest.raises(ValueError):
        loads_instance('{"n": 2, "values": [2], "multiplicities": [1], "extra": 1}')
    with pytest.raises(ValueError):
        loads_instance('[1, 2, 3]')


def test_instance_ground_truth_length_checked():
    text = '{"n": 3, "values": [3, 2, 1], "multiplicities": [1, 1, 1], "ground_truth": [0, 1]}'
    with pytest.raises(ValueError):
        loads_instance(text)


# -- assignment documents -----------------------------------------------------

def test_assignment_round_trip(points_0259):
    P = ground_truth(points_0259).assignment
    text = dumps_assignment(P)
    Q = loads_assignment(text)
    assert Q.n == P.n and Q.m_prime == P.m_prime
    assert Q.entries == P.entries
    assert '"integral": true' in text


def test_assignment_fractional_flagged():
    P = AssignmentMatrix(2, 1, {(1, 2, 1): 0.5})
    text = dumps_assignment(P)
    assert '"integral": false' in text
    assert loads_assignment(text).entries == {(1, 2, 1): 0.5}


def test_assignment_bytes_deterministic(points_0259):
    P = ground_truth(points_0259).assignment
    shuffled = AssignmentMatrix(P.n, P.m_prime,
                                dict(reversed(list(P.entries.items()))))
    assert dumps_assignment(P) == dumps_assignment(shuffled)


def test_assignment_bad_entry_rejected():
    with pytest.raises(ValueError):
        loads_assignment('{"n": 2, "m_prime": 1, "entries": [[1, 2, 1]]}')
    with pytest.raises(ValueError):
        loads_assignment('{"n": 2, "entries": []}')


# -- numeric tokens and result documents --------------------------------------

def test_num_token_exact_decimals():
    assert num_token(Fraction(7, 4)) == "1.75"
    assert num_token(5) == "5"
    assert num_token(Fraction(10, 5)) == "2"


def test_dumps_result_stable_and_fraction_safe():
    doc = {"score": Fraction(1, 2), "exact_thirds": Fraction(1, 3), "tag": None}
    text = dumps_result(doc)
    assert text == dumps_result(doc)
    assert '"score": 0.5' in text
    assert '"exact_thirds": "1/3"' in text


# -- CSV ----------------------------------------------------------------------

def test_write_csv_format():
    buf = io.StringIO()
    write_csv(buf, ["a", "b"], [[1, "x"], [2, None]])
    assert buf.getvalue() == "a,b\n1,x\n2,\n"
