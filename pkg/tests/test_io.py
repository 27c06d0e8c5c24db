import numpy as np
import pytest
from hypothesis import given, settings, HealthCheck
from hypothesis import strategies as st

from minmax_attach import (
    InvalidInputError,
    NodeRecord,
    ParseError,
    TieredPopulation,
    closed_form_solution,
    closed_form_tiered,
    io,
    msa_a0,
    nodes_from_fitness,
)

fitness = st.floats(min_value=1e-300, max_value=1e300, allow_nan=False, allow_infinity=False)


def _write(tmp_path, text, name="nodes.csv"):
    path = tmp_path / name
    path.write_bytes(text.encode("utf-8"))
    return path


def test_homogeneous_row(tmp_path):
    pop = io.parse_node_table(_write(tmp_path, "id,tier,fitness\n0,,2.0\n"))
    assert pop == [NodeRecord(0, 2.0)]


def test_tiered_rows(tmp_path):
    pop = io.parse_node_table(_write(tmp_path, "id,tier,fitness\n0,1,2.0\n0,0,1.0\n1,0,3.0\n"))
    assert isinstance(pop, TieredPopulation)
    assert pop.sizes == (2, 1)
    assert pop.fitness(0).tolist() == [1.0, 3.0]


def test_header_only_is_empty_population(tmp_path):
    with pytest.raises(InvalidInputError):
        io.parse_node_table(_write(tmp_path, "id,tier,fitness\n"))


def test_negative_fitness_names_line(tmp_path):
    with pytest.raises(ParseError) as exc:
        io.parse_node_table(_write(tmp_path, "id,tier,fitness\n4,1,2.0\n5,1,-1.0\n"))
    assert exc.value.line == 3
    assert "line 3" in str(exc.value)
    assert "positive" in str(exc.value)


@pytest.mark.parametrize("text,line", [
    ("id,fitness\n0,1.0\n", 1),
    ("id,tier,fitness\n0,,1.0,9\n", 2),
    ("id,tier,fitness\n0,,1.0\nx,,1.0\n", 3),
    ("id,tier,fitness\n0,a,1.0\n", 2),
    ("id,tier,fitness\n0,,abc\n", 2),
    ("id,tier,fitness\n0,,nan\n", 2),
    ("id,tier,fitness\n0,,inf\n", 2),
    ("id,tier,fitness\n0,,1e301\n", 2),
    ("id,tier,fitness\n0,,1.0\n0,,2.0\n", 3),
    ("id,tier,fitness\n0,0,1.0\n0,0,2.0\n", 3),
    ("id,tier,fitness\n0,0,1.0\n1,,2.0\n", 3),
    ("id,tier,fitness\n0,-1,1.0\n", 2),
])
def test_malformed_rows(tmp_path, text, line):
    with pytest.raises(ParseError) as exc:
        io.parse_node_table(_write(tmp_path, text))
    assert exc.value.line == line


def test_non_contiguous_tiers(tmp_path):
    with pytest.raises(ParseError):
        io.parse_node_table(_write(tmp_path, "id,tier,fitness\n0,0,1.0\n0,2,1.0\n"))


def test_same_id_in_different_tiers_is_fine(tmp_path):
    pop = io.parse_node_table(_write(tmp_path, "id,tier,fitness\n0,0,1.0\n0,1,1.0\n"))
    assert pop.sizes == (1, 1)


@settings(suppress_health_check=[HealthCheck.function_scoped_fixture])
@given(st.lists(fitness, min_size=1, max_size=20))
def test_homogeneous_round_trip(tmp_path, phi):
    pop = nodes_from_fitness(phi)
    path = tmp_path / "rt.csv"
    io.write_node_table(path, pop)
    assert io.parse_node_table(path) == pop


@settings(suppress_health_check=[HealthCheck.function_scoped_fixture])
@given(st.lists(st.lists(fitness, min_size=1, max_size=5), min_size=1, max_size=4))
def test_tiered_round_trip(tmp_path, tiers):
    pop = TieredPopulation.from_fitness(tiers)
    path = tmp_path / "rt.csv"
    io.write_node_table(path, pop)
    assert io.parse_node_table(path) == pop


def test_files_are_lf_utf8(tmp_path):
    path = tmp_path / "n.csv"
    io.write_node_table(path, nodes_from_fitness([0.1, 2.0]))
    raw = path.read_bytes()
    assert b"\r" not in raw
    assert raw == b"id,tier,fitness\n0,,0.1\n1,,2.0\n"


def test_solution_files(tmp_path):
    pop = nodes_from_fitness([1.0, 2.0, 3.0])
    sol = closed_form_solution(pop)
    path = tmp_path / "sol.csv"
    io.write_solution(path, pop, sol)
    lines = path.read_text().splitlines()
    assert lines[0] == "id,p,q,pU"
    table = io.read_solution(path)
    assert table["tier"] is None
    assert np.array_equal(table["p"], sol.p) and np.array_equal(table["q"], sol.q)

    tpop = TieredPopulation.from_fitness([[1, 1], [1, 3]])
    io.write_solution(path, tpop, closed_form_tiered(tpop))
    assert path.read_text().splitlines() == [
        "id,tier,p,q,pU", "0,0,0.5,0.5,0.5", "1,0,0.5,0.5,0.5",
        "0,1,0.25,0.25,0.25", "1,1,0.75,0.75,0.25",
    ]
    assert io.read_solution(path)["tier"].tolist() == [0, 0, 1, 1]


def test_trace_file(tmp_path):
    _, trace = msa_a0([1.0, 1.0], 100, 1e-9)
    path = tmp_path / "t.csv"
    io.write_trace(path, trace)
    lines = path.read_text().splitlines()
    assert lines[0] == "iteration,upper,lower,gap"
    assert lines[1] == "1,1.0,0.0,1.0"
    assert lines[-1] == "6,0.5,0.5,0.0"
