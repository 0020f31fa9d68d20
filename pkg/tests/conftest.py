import pytest

from padicrd import complete_graph, embed, path_graph, refine


@pytest.fixture
def k4():
    return embed(complete_graph(4))


@pytest.fixture
def k4_grid3(k4):
    return refine(k4, 3)


@pytest.fixture
def p3():
    return embed(path_graph(3))
