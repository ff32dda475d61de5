import numpy as np
import pytest
from hypothesis import given, strategies as st

from mpgrad.errors import MpgradError
from mpgrad.measures import SignedMeasure


def test_canonical_form_merges_and_drops_zeros():
    mu = SignedMeasure([[1, 0], [0, 0], [1, 0], [2, 2]], [1, 1, 1, 0], 2)
    assert mu.locations.tolist() == [[0, 0], [1, 0]]
    assert mu.mults.tolist() == [1, 2]


def test_cancellation_gives_empty_measure():
    mu = SignedMeasure([[1.0], [1.0]], [3, -3], 1)
    assert len(mu) == 0 and mu == SignedMeasure.zero(1)


def test_bars_normalize_infinite_deaths():
    mu = SignedMeasure([[0, 0, np.inf, 3.0]], [1], 2, "bars")
    assert np.isinf(mu.locations[0, 2:]).all()
    with pytest.raises(MpgradError):
        SignedMeasure([[2.0, 1.0]], [1], 1, "bars")
    with pytest.raises(MpgradError):
        SignedMeasure([[np.inf]], [1], 1)


@given(st.lists(st.tuples(st.integers(-3, 3), st.integers(-3, 3), st.integers(-2, 2)), max_size=12))
def test_arithmetic(rows):
    locs = [r[:2] for r in rows]
    mults = [r[2] for r in rows]
    mu = SignedMeasure(np.array(locs, dtype=float).reshape(-1, 2), mults, 2)
    assert mu - mu == SignedMeasure.zero(2)
    assert (mu + mu).total_mass == 2 * mu.total_mass
    assert -(-mu) == mu
    pos, _ = mu.expanded(1)
    neg, _ = mu.expanded(-1)
    assert len(pos) - len(neg) == mu.total_mass


def test_hook_mass():
    mu = SignedMeasure([[0, np.inf], [1, 2]], [1, 1], 1, "bars")
    assert mu.mass_of_hook_set([1.5], [1.5]) == 2
    assert mu.mass_of_hook_set([1.5], [2.0]) == 1
    assert mu.mass_of_hook_set([1.5]) == 1
    assert mu.mass_of_hook_set([0.5], [1.5]) == 1
