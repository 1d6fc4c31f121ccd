import json
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from onlinecolor.adversary.rand import fixed_descriptor, realize, sample_gk
from onlinecolor.disk import (
    AmbiguousTangency,
    Disk,
    DiskArrangement,
    build_theorem_disk,
    choose_eps,
    embed_disks,
    expected_graph,
    intersection_graph,
    strip_width,
    theorem_k_disk,
    verify_embedding,
)
from onlinecolor.graph import GraphData


def check(sample, rho):
    arr = embed_disks(sample, rho)
    rep = verify_embedding(arr, expected_graph(sample), roots=sample.root_vertices)
    return arr, rep


def test_level_one_is_a_path():
    s = sample_gk(0, 2, 1)
    arr, rep = check(s, 2)
    assert rep.ok, str(rep)
    assert len(arr.disks) == 3
    g = intersection_graph(arr)
    assert sorted(g.edges()) == sorted(expected_graph(s).edges())
    assert sorted(len(g.adj[v]) for v in range(3)) == [1, 1, 2]
    assert math.isclose(arr.ratio, 2)


@pytest.mark.parametrize("bits", [(0,) * 6, (1,) * 6, (1, 0, 1, 0, 0, 1)])
def test_level_two_fixed_descriptors(bits):
    s = realize(fixed_descriptor(2, bits), 2)
    arr, rep = check(s, 13)
    assert rep.ok, str(rep)
    assert len(arr.disks) == s.n + 1 <= 2 * 12 ** 2


@settings(max_examples=12, deadline=None)
@given(st.integers(0, 10_000), st.integers(1, 3), st.sampled_from(["low", "high"]))
def test_random_samples_embed(seed, k, which):
    rho = 12 ** (k - 1) + 1 if which == "low" else 2 * 12 ** k
    s = sample_gk(seed, 2, k)
    arr, rep = check(s, rho)
    assert rep.ok, str(rep)
    assert arr.delta > 0
    assert math.isclose(arr.ratio, rho, rel_tol=1e-9)


def test_strip_widths():
    assert strip_width(1, 0.3) == 2
    eps = choose_eps(3, 12 ** 2 + 5)
    assert 0 < eps < 1
    assert choose_eps(1, 7) == 1
    w = [strip_width(j, eps) for j in range(1, 4)]
    assert w == sorted(w)


def test_precondition_errors():
    with pytest.raises(ValueError, match="rho too small"):
        embed_disks(sample_gk(0, 2, 3), 144)
    with pytest.raises(ValueError, match="d = 2"):
        embed_disks(sample_gk(0, 3, 1), 5)
    with pytest.raises(ValueError, match="unpadded"):
        embed_disks(sample_gk(0, 2, 1).padded(10), 5)


def arrangement(disks):
    return DiskArrangement(disks, list(range(len(disks))), rho=1.0, k=0)


def test_far_and_concentric_pairs():
    far = arrangement([Disk(0, 0, 1), Disk(5, 0, 1)])
    assert intersection_graph(far).m == 0
    nested = arrangement([Disk(0, 0, 3), Disk(0, 0, 1)])
    assert intersection_graph(nested).m == 1


def test_exact_tangency_is_ambiguous():
    arr = arrangement([Disk(0, 0, 1), Disk(2, 0, 1)])
    with pytest.raises(AmbiguousTangency, match="between vertices 0 and 1"):
        intersection_graph(arr)
    rep = verify_embedding(arr, GraphData.empty(2))
    assert not rep.ok and "ambiguous tangency" in str(rep)


def test_displaced_disk_is_reported():
    s = sample_gk(7, 2, 2)
    arr = embed_disks(s, 13)
    leaf = max(range(s.size_gk), key=lambda v: s.phase[v])
    i = arr.index_of()[leaf]
    d = arr.disks[i]
    arr.disks[i] = Disk(d.cx, d.cy - 3 * arr.delta - 2 * d.r, d.r)
    rep = verify_embedding(arr, expected_graph(s), roots=s.root_vertices)
    assert not rep.ok
    assert any(leaf in e for e in rep.missing)


def test_radius_ratio_mismatch_reported():
    s = sample_gk(1, 2, 1)
    arr = embed_disks(s, 5)
    arr.rho = 6
    rep = verify_embedding(arr, expected_graph(s))
    assert any("ratio" in p for p in rep.problems)


def test_level_for_size():
    assert theorem_k_disk(25, 25) == 1
    assert theorem_k_disk(10 ** 6, 288) == 2
    assert theorem_k_disk(288, 10 ** 6) == 2
    with pytest.raises(ValueError):
        theorem_k_disk(24, 100)


def test_padding_adds_isolated_disks():
    inst = build_theorem_disk(400, 300, seed=3)
    arr = inst.arrangement
    assert len(arr.disks) == 400 and inst.padding > 0
    assert math.isclose(arr.ratio, 300, rel_tol=1e-9)
    g = intersection_graph(arr)
    assert g.m == expected_graph(inst.sample).m
    assert all(not g.adj[v] for v in range(400 - inst.padding, 400))


def test_json_round_trip_and_svg(tmp_path):
    s = sample_gk(2, 2, 2)
    arr = embed_disks(s, 13)
    path = tmp_path / "disks.json"
    arr.dump_json(path)
    back = DiskArrangement.from_json(json.loads(path.read_text()), rho=13, k=2)
    assert back.disks == arr.disks and back.vertex == arr.vertex
    assert intersection_graph(back) == intersection_graph(arr)
    svg = arr.to_svg()
    assert svg.startswith("<svg") and svg.count("<circle") == len(arr.disks)
