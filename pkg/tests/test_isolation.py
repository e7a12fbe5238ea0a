import pytest

from freesep import stallings
from freesep.isolation import (
    ScanBounds,
    Violation,
    is_prime,
    isolation_scan,
    p_prime_isolation_scan,
    scan,
)
from freesep.words import Alphabet, cyclically_reduce, inverse, iter_reduced_words, multiply, power

from .conftest import F2

w = F2.parse
F1 = Alphabet(1)
BACKENDS = ["numba", "numpy"]


def brute_force(graph, bounds):
    out = []
    for n in range(1, bounds.max_word_length + 1):
        for f in iter_reduced_words(graph.rank, n):
            if graph.contains(f):
                continue
            for m in bounds.exponents:
                if graph.contains(power(f, m)):
                    out.append(Violation(f, m))
    return out


SUBGROUPS = {
    "H": ["xYXyx", "y"],
    "x2,y": ["xx", "y"],
    "conj": ["yxxY", "xyX"],
    "x2y2": ["xxyy"],
    "index3": ["xxx", "y", "xyX", "xxyXX"],
    "trivial": [],
}


@pytest.mark.parametrize("backend", BACKENDS)
@pytest.mark.parametrize("name", sorted(SUBGROUPS))
def test_scan_matches_brute_force(name, backend):
    g = stallings.build([w(t) for t in SUBGROUPS[name]], rank=2)
    bounds = ScanBounds(6, (2, 3, 4, 5, 6))
    assert isolation_scan(g, bounds, backend=backend) == brute_force(g, bounds)


@pytest.mark.parametrize("backend", BACKENDS)
def test_h_is_isolated_to_length_8(h_graph, backend):
    assert isolation_scan(h_graph, ScanBounds(8, (2, 3, 4, 5)), backend=backend) == []


@pytest.mark.parametrize("backend", BACKENDS)
def test_controls(backend):
    g = stallings.build([w("xx"), w("y")])
    assert isolation_scan(g, ScanBounds(1, (2,)), backend=backend) == [Violation(w("x"), 2), Violation(w("X"), 2)]
    g3 = stallings.build([F1.parse("xxx")])
    assert isolation_scan(g3, ScanBounds(1, (3,)), backend=backend) == [
        Violation(F1.parse("x"), 3),
        Violation(F1.parse("X"), 3),
    ]


def test_p_prime_examples(h_graph):
    assert p_prime_isolation_scan(h_graph, 2, ScanBounds(8, (2, 3, 4, 5))) == []
    g3 = stallings.build([F1.parse("xxx")])
    assert p_prime_isolation_scan(g3, 3, ScanBounds(1, (2, 5))) == []
    assert p_prime_isolation_scan(g3, 3, ScanBounds(6, (2, 3, 4, 5, 6))) == []
    found = p_prime_isolation_scan(g3, 2, ScanBounds(1, (3,)))
    assert Violation(F1.parse("x"), 3) in found
    with pytest.raises(ValueError):
        p_prime_isolation_scan(g3, 4, ScanBounds(1, (3,)))


def test_bounds_validation():
    with pytest.raises(ValueError):
        ScanBounds(0)
    with pytest.raises(ValueError):
        ScanBounds(3, (1, 2))
    assert ScanBounds(3, (5, 2, 2)).exponents == (2, 5)


def test_soundness_and_order():
    g = stallings.build([w("xx"), w("yxyX"), w("yyy")])
    found = isolation_scan(g, ScanBounds(5, (2, 3, 4)))
    assert found
    for v in found:
        assert g.contains(power(v.root, v.exponent)) and not g.contains(v.root)
    keys = [(len(v.root), tuple(v.root.codes()), v.exponent) for v in found]
    assert keys == sorted(keys)


def test_monotonicity():
    g = stallings.build([w("xx"), w("yxyX"), w("yyy")])
    small = set(isolation_scan(g, ScanBounds(3, (2,))))
    big = set(isolation_scan(g, ScanBounds(5, (2, 3))))
    assert small <= big


def test_cyclic_cores_are_covered():
    """A violation f = c core c^-1 for H gives the violation core for c^-1 H c, also found by the scan."""
    gens = [w("xx"), w("y")]
    g = stallings.build(gens)
    bounds = ScanBounds(5, (2, 3))
    for v in isolation_scan(g, bounds):
        core, conj = cyclically_reduce(v.root)
        conj_gens = [multiply(multiply(inverse(conj), h), conj) for h in gens]
        gc = stallings.build(conj_gens, rank=2)
        assert Violation(core, v.exponent) in isolation_scan(gc, ScanBounds(len(core), (v.exponent,)))


def test_rank_three_with_passive_generator():
    f3 = Alphabet(3)
    g = stallings.build([f3.parse("xYXyx"), f3.parse("y"), f3.parse("z")])
    rep = scan(g, ScanBounds(5, (2, 3)))
    assert rep.violations == []
    assert rep.words_scanned == sum(6 * 5 ** (n - 1) for n in range(1, 6))


def test_threads_do_not_change_output(h_graph):
    g = stallings.build([w("xx"), w("yxyX"), w("yyy")])
    b = ScanBounds(6, (2, 3, 5))
    assert isolation_scan(g, b, threads=4) == isolation_scan(g, b, threads=1)


def test_words_scanned_count(h_graph):
    rep = scan(h_graph, ScanBounds(10, (2, 3, 4, 5, 6)))
    assert rep.words_scanned == sum(4 * 3 ** (n - 1) for n in range(1, 11)) == 118096


def test_is_prime():
    assert [n for n in range(20) if is_prime(n)] == [2, 3, 5, 7, 11, 13, 17, 19]
