"""Acceptance gate: one test per criterion, one printed verdict line each.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the verdict
lines as they complete.  Tolerances and budgets are pinned here, not
configurable.
"""

import time
from fractions import Fraction
from math import factorial

import pytest

from peaklab.cli import main as cli_main
from peaklab.exact import (
    argmax_single_peak,
    regular_tree_deep_vertex_count,
    regular_tree_size,
    sharpened_ratio_bound_check,
    single_peak_count_at,
    twin_factor_products,
)
from peaklab.graphs import (
    bfs_distances,
    centroids,
    make_barbell_tree,
    make_grid,
    make_path,
    make_regular_tree,
    make_torus,
    rooted_index,
)
from peaklab.labelings import cluster_trace, gradient_path, peaks
from peaklab.oracle import (
    conditional_statistic,
    conditional_top_locations,
    enumerate_peak_counts,
    growth_vs_uniform_discrepancy,
)
from peaklab.sampling import (
    McmcConfig,
    RngStream,
    canonical_single_peak,
    canonical_two_peaks,
    eden_growth,
    mcmc_conditioned,
    sequential_growth_labeling,
)
from peaklab.graphs import split_by_edge

from conftest import empirical, small_tree_suite, tv_distance


class _Criterion:
    def __init__(self, num, text):
        self.num = num
        self.text = text

    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, exc_type, exc, tb):
        status = "PASS" if exc_type is None else "FAIL"
        dt = time.perf_counter() - self.t0
        print(f"ACCEPTANCE {self.num}: {status} ({dt:.1f}s) - {self.text}")
        return False


def test_criterion_1_exact_formula_oracle_equivalence():
    with _Criterion(1, "product-formula counts equal enumeration on the tree suite"):
        t0 = time.perf_counter()
        for g in small_tree_suite():
            table = conditional_top_locations(g, 1)
            for x in range(g.n_vertices):
                assert single_peak_count_at(g, x) == table.support.get(x, 0)
        assert time.perf_counter() - t0 < 120.0


def test_criterion_2_worked_example_reproduction():
    with _Criterion(2, "conditioned-uniform 1/3 vs 2/3; growth model 1/2 vs 1/2"):
        out = growth_vs_uniform_discrepancy(make_path(4), 1)
        assert out.uniform.probability(0) == Fraction(1, 3)
        assert out.uniform.probability(2) == Fraction(2, 3)
        g = make_path(4)
        rng = RngStream(20240802, 0)
        draws = 100_000
        hits = sum(
            1
            for _ in range(draws)
            if sequential_growth_labeling(g, 1, rng).label_of(0) == 3
        )
        p_hat = hits / draws
        se = (0.25 / draws) ** 0.5
        assert abs(p_hat - 0.5) <= 3 * se


def test_criterion_3_centroid_identification():
    with _Criterion(3, "argmax of single-peak probability = centroid set"):
        for g in small_tree_suite():
            cs = centroids(g)
            assert argmax_single_peak(g) == cs
            assert len(cs) in (1, 2)
            if len(cs) == 2:
                assert g.has_edge(cs[0], cs[1])


def test_criterion_4_regular_tree_formulas():
    with _Criterion(4, "size and deep-vertex-count formulas, d in 2..10, k in 1..6"):
        for d in range(2, 11):
            for k in range(1, 7):
                g = make_regular_tree(d, k)
                assert g.n_vertices == regular_tree_size(d, k)
                dist = bfs_distances(g, 0)
                deep = sum(1 for x in dist if x >= 2)
                assert deep == regular_tree_deep_vertex_count(d, k)
                del g, dist


def test_criterion_5_twin_peak_inequality_chain():
    with _Criterion(5, "five-factor comparison sweep + d=2 oracle factorization"):
        t0 = time.perf_counter()
        for d in range(3, 21):
            for k in range(2, 13):
                r = twin_factor_products(d, k)
                assert r.inequality_holds
                # sign(lhs - rhs) is the sign flip of the polynomial
                assert r.polynomial_value < 0
                assert r.lhs > r.rhs
        assert time.perf_counter() - t0 < 30.0

        # d = 2, k = 2: compare both five-factor products against the
        # 10!-enumeration joint law; a mismatch would downgrade the
        # factorization to d >= 3 without failing the suite
        g = make_regular_tree(2, 2)
        idx = rooted_index(g, 0)
        y3 = min(w for w in g.adj[2] if idx.parent[w] == 2)
        joint = conditional_top_locations(g, 2)
        lhs_oracle = Fraction(joint.support[(0, y3)], factorial(10))
        rhs_oracle = Fraction(joint.support[(1, 2)], factorial(10))
        r22 = twin_factor_products(2, 2)
        if r22.lhs == lhs_oracle and r22.rhs == rhs_oracle:
            print("criterion 5 note: five-factor products exact at d=2, k=2")
        else:
            print(
                "criterion 5 note: factorization downgraded to d>=3 "
                f"(oracle {lhs_oracle}/{rhs_oracle}, factors {r22.lhs}/{r22.rhs})"
            )


def test_criterion_6_sharpened_ratio_bounds():
    with _Criterion(6, "depth-graded root dominance, d in 2..6, k in 1..4"):
        for d in range(2, 7):
            for k in range(1, 5):
                assert sharpened_ratio_bound_check(d, k)


def _chain_peak_law(g, k, init, seed):
    cfg = McmcConfig(steps=1_000_000, burn_in=2_000, thinning=g.n_vertices)
    samples = mcmc_conditioned(g, k, init, cfg, RngStream(seed, 0))
    n = g.n_vertices

    def key_of(lab):
        k1 = lab.vertex_of(n)
        if k == 1:
            return k1
        pk = peaks(g, lab)
        return (k1, pk[0] if pk[1] == k1 else pk[1])

    return empirical(key_of(s) for s in samples)


@pytest.mark.parametrize(
    "label,builder,k,seed",
    [
        ("path4 k=1", lambda: make_path(4), 1, 101),
        ("path4 k=2", lambda: make_path(4), 2, 102),
        ("path5 k=1", lambda: make_path(5), 1, 103),
        ("grid3x3 k=1", lambda: make_grid(3, 3), 1, 104),
    ],
)
def test_criterion_7_mcmc_validity(label, builder, k, seed):
    with _Criterion(7, f"chain vs oracle peak-location law, TV <= 0.02 ({label})"):
        t0 = time.perf_counter()
        g = builder()
        oracle = conditional_top_locations(g, k).as_probabilities()
        if k == 1:
            init = canonical_single_peak(g, 0)
        else:
            init = canonical_two_peaks(
                g, split_by_edge(g, (1, 2)), 0, g.n_vertices - 1
            )
        law = _chain_peak_law(g, k, init, seed)
        assert tv_distance(law, oracle) <= 0.02
        assert time.perf_counter() - t0 < 300.0


def default_steps(n, samples):
    from peaklab.sampling import default_burn_in

    return default_burn_in(n) + samples * n


def test_criterion_8_structural_invariants_under_sampling():
    with _Criterion(8, "connected clusters on the torus; valid gradient paths"):
        # 100 single-peak samples on the 8x8 torus: every cluster connected
        g = make_torus(2, 8)
        init = canonical_single_peak(g, 0)
        n = g.n_vertices
        cfg = McmcConfig(steps=default_steps(n, 100), burn_in=None, thinning=None)
        samples = mcmc_conditioned(g, 1, init, cfg, RngStream(105, 0))
        assert len(samples) >= 100
        for lab in samples[:100]:
            assert all(cluster_trace(g, lab).connected_flags)

        # 100 gradient paths on the 3 x 50 ladder
        g = make_grid(3, 50)
        init = canonical_single_peak(g, 0)
        n = g.n_vertices
        cfg = McmcConfig(steps=default_steps(n, 100), burn_in=None, thinning=None)
        samples = mcmc_conditioned(g, 1, init, cfg, RngStream(106, 0), pin=[0])
        assert len(samples) >= 100
        for lab in samples[:100]:
            path = gradient_path(g, lab)
            labels = [lab.label_of(v) for v in path]
            assert labels == sorted(labels, reverse=True)
            assert len(path) >= 50
            assert len(set(path)) == len(path)


def test_criterion_9_eden_model():
    with _Criterion(9, "full Eden growth on torus side 30: nesting, connectivity, replay"):
        g = make_torus(2, 30)
        trace = eden_growth(g, 0, g.n_vertices - 1, RngStream(107, 3))
        assert len(trace.addition_order) == g.n_vertices
        assert len(set(trace.addition_order)) == g.n_vertices  # |cluster| = k+1
        assert all(trace.connected_flags)
        # connectivity verified independently of the growth bookkeeping
        seen = {trace.addition_order[0]}
        for v in trace.addition_order[1:]:
            assert any(w in seen for w in g.adj[v])
            seen.add(v)
        assert not trace.stopped_early
        replay = eden_growth(g, 0, g.n_vertices - 1, RngStream(107, 3))
        assert replay == trace


def test_criterion_10_barbell_oracle():
    with _Criterion(10, "9! two-peak joint table on the barbell tree"):
        t0 = time.perf_counter()
        g = make_barbell_tree(2, 5)
        joint = conditional_top_locations(g, 2)
        table = enumerate_peak_counts(g)
        assert joint.total == table.counts[2]
        # marginal of K1 against the independent statistic scan
        k1_marginal = {}
        for (k1, _k2), c in joint.support.items():
            k1_marginal[k1] = k1_marginal.get(k1, 0) + c
        assert k1_marginal == conditional_statistic(g, 2, "peak_location").support
        # support is valid: distinct, non-adjacent peak pairs
        for k1, k2 in joint.support:
            assert k1 != k2 and not g.has_edge(k1, k2)
        assert time.perf_counter() - t0 < 300.0
        # desk-scale report: the close-twin-peaks regime needs n > (m!)^2,
        # far beyond enumeration; here we only record the exact law
        dist_law = conditional_statistic(g, 2, "dist_K1_K2")
        p3 = Fraction(dist_law.support.get(3, 0), dist_law.total)
        p8 = Fraction(
            sum(c for d, c in dist_law.support.items() if d >= 8), dist_law.total
        )
        print(f"criterion 10 note: P2(dist=3) = {p3}, P2(dist>=8) = {p8} at n=2, m=5")


def test_criterion_11_cli_reproducibility(tmp_path):
    with _Criterion(11, "byte-identical CLI outputs, threads 1 vs 8"):
        payloads = []
        for name, threads in (("a", "1"), ("b", "1"), ("c", "8")):
            out = tmp_path / f"{name}.txt"
            code = cli_main(
                [
                    "experiment", "--name", "boundary-roughness", "--n", "16",
                    "--trials", "4", "--seed", "77", "--threads", threads,
                    "--out", str(out),
                ]
            )
            assert code == 0
            payloads.append(out.read_bytes())
        assert payloads[0] == payloads[1] == payloads[2]

        samples = []
        for name in ("s1", "s2"):
            out = tmp_path / f"{name}.csv"
            code = cli_main(
                [
                    "sample", "--graph", "torus:2x16", "--mode", "eden",
                    "--seed", "78", "--out", str(out),
                ]
            )
            assert code == 0
            samples.append(out.read_bytes())
        assert samples[0] == samples[1]
