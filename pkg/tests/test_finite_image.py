import numpy as np
import pytest

from braidcryst import finite_image as fi
from braidcryst.braids import BraidWord, power
from braidcryst.errors import GuardExceededError, UnsupportedModeError


@pytest.mark.parametrize("m,order,center", [(2, 6, 1), (3, 24, 2), (4, 48, 2), (5, 120, 2)])
def test_image_orders(m, order, center):
    G = fi.enumerate_image(m)
    assert G.order == order
    assert len(fi.center(G)) == center


def test_transversal_reproduces_elements():
    G = fi.enumerate_image(3)
    assert G.transversal[0].is_empty()
    for k, w in enumerate(G.transversal):
        assert G.element_of(w) == k
    assert G.edges.shape == (24, 4)
    assert G.edges.min() >= 0 and G.edges.max() < G.order


def test_transversal_words_are_shortest():
    G = fi.enumerate_image(4)
    lengths = [len(w) for w in G.transversal]
    assert lengths == sorted(lengths)


def test_center_m3_is_plus_minus_identity():
    G = fi.enumerate_image(3)
    z = fi.center(G)
    assert z[0] == 0
    assert sorted(G.matrices[k].tolist() for k in z) == [[[1, 0], [0, 1]], [[2, 0], [0, 2]]]


def test_element_orders():
    G = fi.enumerate_image(3)
    assert fi.element_order(G, 0) == 1
    assert fi.element_order(G, G.element_of(power(BraidWord(3, (1, 2)), 3))) == 2
    for g in range(G.order):
        assert G.order % fi.element_order(G, g) == 0
        assert fi.multiply(G, g, fi.inverse_index(G, g)) == 0


def test_conjugacy_classes_m3():
    G = fi.enumerate_image(3)
    classes = fi.conjugacy_classes(G)
    assert len(classes) == 7
    assert sum(len(c) for c in classes) == G.order
    assert classes[0] == [0]


@pytest.mark.parametrize("m,name", [(3, "A4"), (4, "S4"), (5, "A5")])
def test_quotient_by_center(m, name):
    G = fi.enumerate_image(m)
    Q = fi.quotient_by_center(G)
    assert Q.center_quotient
    assert Q.order * len(fi.center(G)) == G.order
    assert fi.match_catalog(fi.fingerprint(Q)) == name
    for k, w in enumerate(Q.transversal):
        assert Q.element_of(w) == k


def test_level_two_is_s3():
    assert fi.match_catalog(fi.fingerprint(fi.enumerate_image(2))) == "S3"


def test_catalog_histograms():
    cat = fi.catalog()
    assert cat["S4"].histogram_dict() == {1: 1, 2: 9, 3: 8, 4: 6}
    assert cat["A4"].histogram_dict() == {1: 1, 2: 3, 3: 8}
    assert cat["A5"].histogram_dict() == {1: 1, 2: 15, 3: 20, 5: 24}
    assert len(set(cat.values())) == len(cat)
    for fp in cat.values():
        assert sum(c for _, c in fp.histogram) == fp.order


def test_unknown_group():
    fp = fi.fingerprint(fi.enumerate_image(4))
    assert fi.match_catalog(fp) == "unknown"


def test_parallel_enumeration_matches_serial():
    serial = fi.enumerate_image(4)
    parallel = fi.enumerate_image(4, workers=3)
    assert parallel.encodings == serial.encodings
    assert parallel.transversal == serial.transversal
    assert np.array_equal(parallel.edges, serial.edges)


def test_generator_orders_divide_group_order():
    G = fi.enumerate_image(5)
    for letter in (1, 2):
        g = G.element_of(BraidWord(3, (letter,)))
        assert len(fi.generated_subgroup(G, [g])) == fi.element_order(G, g)
        assert G.order % fi.element_order(G, g) == 0


def test_order_guard(monkeypatch):
    monkeypatch.setattr(fi, "setting", lambda section, key: 10)
    with pytest.raises(GuardExceededError):
        fi.enumerate_image(5, workers=2)


def test_to_json():
    payload = fi.to_json(fi.enumerate_image(3))
    assert payload["order"] == 24
    assert payload["histogram"] == {"1": 1, "2": 1, "3": 8, "4": 6, "6": 8}
    assert payload["center_order"] == 2
    assert payload["transversal"][0] == ""


PERMUTED_ORDERS = [(-2, 2, -1, 1), (2, -1, -2, 1), (-1, 1, 2, -2)]


@pytest.mark.parametrize("order", PERMUTED_ORDERS)
@pytest.mark.parametrize("m", [2, 3, 4, 5])
def test_fingerprint_ignores_letter_order(m, order):
    G = fi.enumerate_image(m)
    H = fi.enumerate_image(m, letter_order=order)
    assert H.generator_labels == order
    assert fi.fingerprint(H) == fi.fingerprint(G)
    assert set(H.encodings) == set(G.encodings)
    assert fi.match_catalog(fi.fingerprint(fi.quotient_by_center(H))) == fi.match_catalog(
        fi.fingerprint(fi.quotient_by_center(G))
    )


@pytest.mark.parametrize("order", PERMUTED_ORDERS)
def test_permuted_transversal_reproduces_elements(order):
    G = fi.enumerate_image(3, letter_order=order)
    assert G.transversal[0].is_empty()
    assert G.transversal[1].letters == (order[0],)
    for k, w in enumerate(G.transversal):
        assert G.element_of(w) == k
    assert len(fi.conjugacy_classes(G)) == 7
    assert len(fi.center(G)) == 2


@pytest.mark.parametrize("order", [(1, 2, -1), (1, -1, 2, 2), (1, -1, 3, -3)])
def test_letter_order_must_permute_the_generators(order):
    with pytest.raises(UnsupportedModeError):
        fi.enumerate_image(3, letter_order=order)
