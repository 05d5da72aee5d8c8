import random

import pytest
from hypothesis import settings

from pcsp_sandwich.digraph import Digraph, complete_graph
from pcsp_sandwich.hom import CspInstance
from pcsp_sandwich.structcore import Extensional, FiniteStructure

settings.register_profile("default", max_examples=100, deadline=None)
settings.load_profile("default")

SEED = 20240601


@pytest.fixture
def rng():
    return random.Random(SEED)


def graph(k, edges, name="G"):
    return Digraph.of(k, edges).to_structure(name)


def K(k):
    return complete_graph(k).to_structure(f"K{k}")


def random_structure(rng, k, arity=2, max_tuples=6, symbol="E"):
    tuples = {tuple(rng.randrange(k) for _ in range(arity)) for _ in range(rng.randint(0, max_tuples))}
    return FiniteStructure(k, ((symbol, Extensional.from_tuples(arity, tuples)),), "R")


def random_instance(rng, variables, constraints, arity, symbol="E"):
    cons = tuple(
        (symbol, tuple(rng.randrange(variables) for _ in range(arity))) for _ in range(constraints)
    )
    return CspInstance(variables, cons, "rand")
