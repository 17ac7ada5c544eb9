from fractions import Fraction

import pytest

import svdyn as sv


@pytest.fixture
def line_space():
    return sv.FiniteSpace(
        ["p0", "p1", "p2"],
        [["0", "1/2", "1"], ["1/2", "0", "1/2"], ["1", "1/2", "0"]],
    )


@pytest.fixture
def line_map(line_space):
    return sv.FiniteRelation(
        line_space, {"p0": ["p1"], "p1": ["p2"], "p2": ["p2"]})


@pytest.fixture
def cycle_map(line_space):
    return sv.FiniteRelation(
        line_space, {"p0": ["p1"], "p1": ["p2"], "p2": ["p0"]})


@pytest.fixture
def full_map(line_space):
    pts = list(line_space.points)
    return sv.FiniteRelation(line_space, {p: pts for p in pts})


@pytest.fixture
def two_point_identity():
    space = sv.FiniteSpace(["a", "b"], [[0, 1], [1, 0]])
    return sv.FiniteRelation(space, {"a": ["a"], "b": ["b"]})


@pytest.fixture(scope="session")
def folded():
    return sv.folded_doubling_map()


@pytest.fixture(scope="session")
def tent2():
    return sv.tent_family(2.0)


@pytest.fixture(scope="session")
def sym_tent2():
    return sv.symmetrize(sv.tent_family(2.0))


@pytest.fixture(scope="session")
def folded_grid_256():
    return sv.quantize(sv.folded_doubling_map(), Fraction(2, 256))


def random_finite_system(rng, n, max_coord=9):
    """Seeded total relation over a shortest-path metric on n points."""
    names = [f"q{i}" for i in range(n)]
    while True:
        raw = [[0] * n for _ in range(n)]
        for i in range(n):
            for j in range(i + 1, n):
                raw[i][j] = raw[j][i] = 1 + rng.next_below(max_coord)
        # metric closure keeps the triangle inequality exactly
        for k in range(n):
            for i in range(n):
                for j in range(n):
                    if raw[i][k] + raw[k][j] < raw[i][j]:
                        raw[i][j] = raw[i][k] + raw[k][j]
        if all(raw[i][j] > 0 for i in range(n) for j in range(n) if i != j):
            break
    space = sv.FiniteSpace(names, raw)
    images = {}
    for p in names:
        size = 1 + rng.next_below(n)
        members = set()
        while len(members) < size:
            members.add(names[rng.next_below(n)])
        images[p] = sorted(members)
    return sv.FiniteRelation(space, images)
