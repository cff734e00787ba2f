import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sirgld.epi_data import (
    EpidemicSeries,
    ValidationError,
    grouped_counts,
    load_series,
    parse_series,
    serialize_series,
    susceptible_series,
)

HEADER = "day,new_infected,new_died,new_recovered\n"


def write(tmp_path, body, name="in.csv"):
    p = tmp_path / name
    p.write_text(HEADER + body, encoding="utf-8")
    return p


def test_running_sums(tmp_path):
    s = load_series(write(tmp_path, "1,2,0,0\n2,3,1,0\n3,5,0,2\n"))
    np.testing.assert_array_equal(s.cum_infected, [2, 5, 10])
    np.testing.assert_array_equal(s.cum_removed, [0, 1, 3])
    np.testing.assert_array_equal(s.active, [2, 4, 7])


def test_all_zero_rows(tmp_path):
    s = load_series(write(tmp_path, "1,0,0,0\n2,0,0,0\n"))
    assert not s.cum_infected.any() and not s.cum_removed.any() and not s.active.any()


@pytest.mark.parametrize(
    "body, row, fragment",
    [
        ("1,2,0,0\n2,1,-1,0\n", 3, "negative new_died"),
        ("1,2,0,0\n2,x,0,0\n", 3, "non-numeric"),
        ("1,2,0,0\n1,1,0,0\n", 3, "duplicate day"),
        ("1,2,0,0\n3,1,0,0\n", 3, "missing day"),
        ("1,2,0,0\n2,1.5,0,0\n", 3, "integer"),
        ("1,2,0\n", 2, "columns"),
    ],
)
def test_validation_errors_name_the_row(tmp_path, body, row, fragment):
    with pytest.raises(ValidationError) as info:
        load_series(write(tmp_path, body))
    assert any(r == row and fragment in m for r, m in info.value.errors), info.value.errors


def test_fractional_day_rejected(tmp_path):
    with pytest.raises(ValidationError):
        load_series(write(tmp_path, "1,1,0,0\n1.5,1,0,0\n"))


def test_empty_file(tmp_path):
    p = tmp_path / "empty.csv"
    p.write_text("")
    with pytest.raises(ValidationError, match="empty"):
        load_series(p)
    with pytest.raises(ValidationError):
        load_series(write(tmp_path, ""))


def test_bad_header(tmp_path):
    p = tmp_path / "h.csv"
    p.write_text("date,cases\n1,2\n")
    with pytest.raises(ValidationError) as info:
        load_series(p)
    assert info.value.errors[0][0] == 1


def test_removed_exceeding_infected_rejected():
    with pytest.raises(ValueError):
        parse_series(HEADER + "1,1,2,0\n")


def test_iso_dates_become_day_indices():
    s = parse_series(HEADER + "2020-01-22,3,0,0\n2020-01-23,4,0,1\n2020-01-24,1,0,0\n")
    np.testing.assert_array_equal(s.days, [1, 2, 3])
    np.testing.assert_array_equal(s.cum_infected, [3, 7, 8])
    with pytest.raises(ValidationError, match="missing"):
        parse_series(HEADER + "2020-01-22,3,0,0\n2020-01-24,4,0,1\n")


def test_serialize_adds_derived_columns():
    s = parse_series(HEADER + "1,2,0,0\n2,3,1,0\n")
    lines = serialize_series(s).splitlines()
    assert lines[0] == "day,new_infected,new_died,new_recovered,cum_infected,cum_removed,active"
    assert lines[2] == "2,3,1,0,5,1,4"


@st.composite
def count_tables(draw):
    n = draw(st.integers(1, 30))
    rows = []
    active = 0
    for d in range(1, n + 1):
        inf = draw(st.integers(0, 500))
        died = draw(st.integers(0, active + inf))
        rec = draw(st.integers(0, active + inf - died))
        active += inf - died - rec
        rows.append((d, inf, died, rec))
    return rows


@settings(max_examples=60, deadline=None)
@given(count_tables())
def test_round_trip_and_invariants(rows):
    text = HEADER + "".join(f"{d},{a},{b},{c}\n" for d, a, b, c in rows)
    s = parse_series(text)
    out = serialize_series(s)
    # dropping the derived columns gives back the input exactly
    assert "\n".join(",".join(line.split(",")[:4]) for line in out.splitlines()) + "\n" == text
    assert np.all(np.diff(s.cum_infected) >= 0) and np.all(np.diff(s.cum_removed) >= 0)
    np.testing.assert_array_equal(s.active, s.cum_infected - s.cum_removed)
    assert np.all(s.active >= 0)
    if s.cum_infected[-1] > 0:
        assert grouped_counts(s).total == s.cum_infected[-1]


def test_susceptibles():
    s = EpidemicSeries.from_cumulative([2, 5, 10], [0, 0, 0])
    np.testing.assert_array_equal(susceptible_series(s, 100), [98, 95, 90])
    assert susceptible_series(s, 10)[-1] == 0
    with pytest.raises(ValueError, match="negative"):
        susceptible_series(s, 9)


def test_susceptibles_at_hubei_scale(gld_counts):
    S = susceptible_series(gld_counts, 70_000)
    assert S.min() >= 0


def test_grouped_counts():
    s = EpidemicSeries.from_cumulative(np.cumsum([4, 1, 2]), [0, 0, 0])
    g = grouped_counts(s)
    np.testing.assert_array_equal(g.counts, [4, 1, 2])
    assert g.n == 2
    assert g.total == s.cum_infected[-1]
    one = grouped_counts(EpidemicSeries.from_cumulative([7], [0]))
    assert one.n == 0 and one.counts.tolist() == [7]


def test_grouped_k0_is_first_cumulative_value(gld_counts):
    g = grouped_counts(gld_counts.truncate(20))
    assert g.counts[0] == gld_counts.cum_infected[0]
    assert g.total == gld_counts.cum_infected[19]


def test_truncate(gld_counts):
    part = gld_counts.truncate(15)
    assert len(part) == 15 and part.last_day == 15
    assert len(part.records) == 15
