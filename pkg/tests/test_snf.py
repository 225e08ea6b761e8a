import random

from hypothesis import given, strategies as st

from nilfract.snf import IntMatrix, smith_normal_form

from oracles import invariant_factors


def _check(rows):
    m = IntMatrix.from_rows(rows)
    u, d, v = smith_normal_form(m)
    assert (u @ m @ v).to_rows() == d.to_rows()
    assert abs(u.det()) == 1 and abs(v.det()) == 1
    assert d.is_diagonal()
    diag = d.diagonal()
    assert all(x >= 0 for x in diag)
    nz = [x for x in diag if x]
    assert diag == nz + [0] * (len(diag) - len(nz))
    assert all(b % a == 0 for a, b in zip(nz, nz[1:]))
    return u, d, v


def test_one_by_one():
    u, d, v = _check([[6]])
    assert u.to_rows() == [[1]] and d.to_rows() == [[6]] and v.to_rows() == [[1]]


def test_two_by_three_diagonal():
    _, d, _ = _check([[2, 0], [0, 3]])
    assert d.to_rows() == [[1, 0], [0, 6]]


def test_zero():
    _, d, _ = _check([[0]])
    assert d.to_rows() == [[0]]


def test_non_square_and_negative():
    _, d, _ = _check([[-4, 6, 0], [2, 8, -10]])
    assert d.diagonal() == invariant_factors([[-4, 6, 0], [2, 8, -10]])


def test_random_six_by_six_against_minors(seed):
    rng = random.Random(seed)
    for _ in range(40):
        r, c = rng.randint(1, 4), rng.randint(1, 4)
        rows = [[rng.randint(-20, 20) for _ in range(c)] for _ in range(r)]
        _, d, _ = _check(rows)
        assert d.diagonal() == invariant_factors(rows)


@given(st.integers(1, 6).flatmap(lambda r: st.integers(1, 6).flatmap(
    lambda c: st.lists(st.lists(st.integers(-20, 20), min_size=c, max_size=c), min_size=r, max_size=r))))
def test_snf_properties(rows):
    _check(rows)


def test_deterministic():
    rows = [[3, 7, 1], [9, -2, 4], [6, 6, 6]]
    assert [x.to_rows() for x in smith_normal_form(IntMatrix.from_rows(rows))] == \
        [x.to_rows() for x in smith_normal_form(IntMatrix.from_rows(rows))]


def test_big_entries_exact():
    rows = [[2 ** 70, 3 ** 45], [5 ** 30, 7 ** 25]]
    _, d, _ = _check(rows)
    assert d.diagonal() == invariant_factors(rows)
