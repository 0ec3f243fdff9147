"""Tests for the index-calculus engine: factor bases, sieving, solving."""

import random

import pytest

from frobsieve.errors import SieveTimeout
from frobsieve.ffcore import Poly, factor, factorize_int, monic_irreducibles
from frobsieve.galoisrep import (
    build_artin_schreier,
    build_kummer,
    build_torus,
)
from frobsieve.elliptic import build_elliptic_residue
from frobsieve.indexcalc import (
    LogTable,
    Relation,
    build_factor_base,
    build_log_table,
    collect_relations,
    compute_logs,
    find_generator,
    individual_log,
    smooth_factor,
    solve_log_system,
)


def evaluate_smooth(fb, cols, const):
    """Multiply the claimed factorization back out in the field."""
    ring = fb.rep.ring
    acc = ring.pow(ring.embed(fb.g0), const % fb.rep.order())
    for col, exp in cols.items():
        acc = ring.mul(acc, ring.pow(fb.column_value(col), exp % fb.rep.order()))
    return acc


@pytest.fixture(scope="module")
def kummer_rep():
    return build_kummer(43, 6)


@pytest.fixture(scope="module")
def kummer_run(kummer_rep):
    return compute_logs(kummer_rep, 2, seed=0)


@pytest.fixture(scope="module")
def torus_rep():
    return build_torus(13, 7, u_r=8)


@pytest.fixture(scope="module")
def torus_run(torus_rep):
    return compute_logs(torus_rep, 2, seed=1)


@pytest.fixture(scope="module")
def as_rep():
    return build_artin_schreier(7)


@pytest.fixture(scope="module")
def elliptic_ext():
    return build_elliptic_residue(11, 7)


# ---------------------------------------------------------------------------
# Factor bases.


class TestFactorBase:
    def test_kummer_degree_one_orbits(self, kummer_rep):
        fb = build_factor_base(kummer_rep, 1)
        # 43 linear polys: X alone, the rest in six-element scaling orbits
        assert sum(o.size for o in fb.orbits) == 43
        assert len(fb.orbits) == 8
        sizes = sorted(o.size for o in fb.orbits)
        assert sizes == [1] + [6] * 7

    def test_kummer_reduction_at_least_half(self, kummer_rep):
        fb = build_factor_base(kummer_rep, 2)
        total = sum(o.size for o in fb.orbits)
        assert total == 946
        assert len(fb.orbits) == 162
        assert len(fb.orbits) <= total // 2

    def test_artin_schreier_single_linear_orbit(self, as_rep):
        fb = build_factor_base(as_rep, 1)
        # X -> X+1 -> ... -> X+6 is one orbit of length p
        assert len(fb.orbits) == 1
        assert fb.orbits[0].size == 7

    def test_partition_is_exact_at_max_kappa(self):
        rep = build_artin_schreier(3)
        fb = build_factor_base(rep, 2)
        # necklace counts: 3 linear, (3^2 - 3)/2 = 3 quadratic
        total = len(list(monic_irreducibles(3, 2)))
        assert total == 6
        assert sum(o.size for o in fb.orbits) == total
        seen = set()
        for orb in fb.orbits:
            for q in orb.polys():
                assert q.coeffs not in seen
                seen.add(q.coeffs)

    def test_member_lookup_covers_base(self, torus_rep):
        fb = build_factor_base(torus_rep, 2)
        for q in monic_irreducibles(13, 2):
            idx, mem = fb.member_of(q)
            assert mem.poly == q
            assert fb.orbits[idx] is not None

    def test_kappa_bounds(self, as_rep):
        with pytest.raises(ValueError):
            build_factor_base(as_rep, 0)
        with pytest.raises(ValueError):
            build_factor_base(as_rep, 7)

    def test_elliptic_orbits_are_singletons(self, elliptic_ext):
        ext = elliptic_ext
        fb = build_factor_base(ext.rep, 2)
        assert all(o.size == 1 for o in fb.orbits)
        assert len(fb.orbits) == len(list(monic_irreducibles(11, 2)))


class TestFreeRelations:
    def test_rows_verify_and_count(self, kummer_rep):
        fb = build_factor_base(kummer_rep, 1)
        g = find_generator(kummer_rep)
        rows = fb.free_relations()
        assert len(rows) == len(fb.orbits) + 1
        for rel in rows:
            assert rel.e == 0
            assert rel.verify(fb, g)

    def test_x_orbit_row_encodes_scaling(self, kummer_rep):
        # x^(p-1) = zeta, so the closure row for X's orbit pins
        # (p-1) log x against the constant column
        fb = build_factor_base(kummer_rep, 1)
        xcol = next(
            i for i, o in enumerate(fb.orbits) if o.anchor == Poly([0, 1], 43)
        )
        row = fb.free_relations()[xcol]
        assert row.columns == {xcol: 42}
        zeta = kummer_rep.params["zeta"]
        assert row.const_exp % (43 - 1) == -fb.scalar_log(zeta) % 42

    def test_torus_kernel_row(self, torus_rep):
        fb = build_factor_base(torus_rep, 2)
        g = find_generator(torus_rep)
        rows = fb.free_relations()
        kernel_row = rows[fb.kernel_index]
        orb = fb.orbits[fb.kernel_index]
        assert orb.is_kernel
        assert kernel_row.columns.get(fb.kernel_index, 0) == (
            orb.closure_exponent % torus_rep.order()
        )
        assert kernel_row.verify(fb, g)


# ---------------------------------------------------------------------------
# Smoothness decomposition.


class TestSmoothFactor:
    def test_split_quadratic_present(self, kummer_rep):
        fb = build_factor_base(kummer_rep, 1)
        z = Poly([-1, 1], 43) * Poly([-2, 1], 43)
        hit = smooth_factor(fb, z)
        assert hit is not None
        cols, const = hit
        # X-1 and X-2 live in different scaling orbits
        assert len(cols) == 2
        assert evaluate_smooth(fb, cols, const) == kummer_rep.ring.el(z)

    def test_absent_when_factor_too_big(self, kummer_rep):
        fb = build_factor_base(kummer_rep, 2)
        cubic = next(q for q in monic_irreducibles(43, 3) if q.degree == 3)
        assert smooth_factor(fb, cubic) is None

    def test_member_folds_to_anchor_column(self, kummer_rep):
        fb = build_factor_base(kummer_rep, 2)
        for orb in fb.orbits[:12]:
            for mem in orb.members:
                hit = smooth_factor(fb, mem.poly)
                assert hit is not None
                cols, const = hit
                idx, _ = fb.member_of(mem.poly)
                assert set(cols) == {idx}
                assert cols[idx] == 43 ** mem.shift
                assert evaluate_smooth(fb, cols, const) == kummer_rep.ring.el(mem.poly)

    def test_scaled_element_unit_on_constant_column(self, kummer_rep):
        fb = build_factor_base(kummer_rep, 1)
        z = Poly([0, 5], 43)  # 5x
        cols, const = smooth_factor(fb, z)
        assert evaluate_smooth(fb, cols, const) == kummer_rep.ring.el(z)

    def test_frobenius_power_consistency(self, kummer_rep):
        # x^p computed in the field must decompose with exponent p on X's
        # column, matching the structural image zeta*x
        fb = build_factor_base(kummer_rep, 1)
        ring = kummer_rep.ring
        zp = ring.pow(ring.x(), 43)
        cols, const = smooth_factor(fb, zp)
        xcol, _ = fb.member_of(Poly([0, 1], 43))
        assert cols == {xcol: 1}
        assert const == fb.scalar_log(kummer_rep.params["zeta"])

    def test_random_presence_matches_factorization(self, as_rep):
        fb = build_factor_base(as_rep, 2)
        rng = random.Random(77)
        ring = as_rep.ring
        for _ in range(60):
            z = as_rep.field.random_poly(rng, rng.randrange(1, 7))
            if z.is_zero():
                continue
            hit = smooth_factor(fb, z)
            _, facs = factor(z)
            expect = all(q.degree <= 2 for q, _ in facs)
            assert (hit is not None) == expect
            if hit is not None:
                assert evaluate_smooth(fb, *hit) == ring.el(z)

    def test_torus_kernel_weights_fold(self, torus_rep):
        fb = build_factor_base(torus_rep, 2)
        ring = torus_rep.ring
        rng = random.Random(3)
        hits = 0
        while hits < 15:
            z = torus_rep.field.random_poly(rng, rng.randrange(1, 7))
            if z.is_zero():
                continue
            hit = smooth_factor(fb, z)
            if hit is None:
                continue
            hits += 1
            assert evaluate_smooth(fb, *hit) == ring.el(z)

    def test_zero_rejected(self, as_rep):
        fb = build_factor_base(as_rep, 2)
        with pytest.raises(ValueError):
            smooth_factor(fb, Poly([], 7))


# ---------------------------------------------------------------------------
# Relation collection.


class TestCollectRelations:
    def test_deterministic_given_seed(self, as_rep):
        fb = build_factor_base(as_rep, 2)
        g = find_generator(as_rep)
        a = collect_relations(as_rep, fb, 12, seed=9, g=g)
        b = collect_relations(as_rep, fb, 12, seed=9, g=g)
        assert a == b
        c = collect_relations(as_rep, fb, 12, seed=10, g=g)
        assert a != c

    def test_worker_partition_merges_identically(self, as_rep):
        fb = build_factor_base(as_rep, 2)
        g = find_generator(as_rep)
        single = collect_relations(as_rep, fb, 12, seed=9, g=g, workers=1)
        for workers in (2, 3, 7):
            assert collect_relations(
                as_rep, fb, 12, seed=9, g=g, workers=workers
            ) == single

    def test_relations_all_sound(self, torus_rep, torus_run):
        fb, g, relations, _ = torus_run
        assert all(rel.verify(fb, g) for rel in relations)

    def test_timeout_carries_partial(self, as_rep):
        fb = build_factor_base(as_rep, 2)
        g = find_generator(as_rep)
        with pytest.raises(SieveTimeout) as info:
            collect_relations(as_rep, fb, 500, seed=9, g=g, max_trials=40)
        assert 0 < len(info.value.partial) < 500
        assert all(rel.verify(fb, g) for rel in info.value.partial)

    def test_generator_has_full_order(self, torus_rep):
        g = find_generator(torus_rep)
        ring = torus_rep.ring
        N = torus_rep.order()
        assert ring.pow(g, N) == ring.one()
        for ell in factorize_int(N):
            assert ring.pow(g, N // ell) != ring.one()


# ---------------------------------------------------------------------------
# The linear solver.


class TestSolver:
    def test_two_by_two_toy(self):
        rels = [Relation({0: 1, 1: 1}, 0, 3), Relation({0: 1, 1: -1}, 0, 1)]
        values, uncertain = solve_log_system(rels, 8, 3)
        assert values[:2] == [2, 1]
        # without a verifier the modulo-2 ambiguity is reported honestly
        assert 0 in uncertain and 1 in uncertain

    def test_toy_with_verifier_resolves(self):
        rels = [Relation({0: 1, 1: 1}, 0, 3), Relation({0: 1, 1: -1}, 0, 1)]
        truth = {0: 6, 1: 5}

        def verifier(col, lam):
            return truth.get(col) == lam

        values, uncertain = solve_log_system(rels, 8, 3, verifier)
        assert values[0] == 6 and values[1] == 5
        assert 0 not in uncertain and 1 not in uncertain

    def test_random_full_rank_systems(self):
        rng = random.Random(5)
        for N in (24, 360, 2 ** 3 * 9 * 35):
            for _ in range(8):
                n = rng.randrange(2, 6)
                truth = [rng.randrange(N) for _ in range(n)]
                rels = []
                for _ in range(n + 3):
                    coeffs = {c: rng.randrange(N) for c in range(n)}
                    e = sum(coeffs[c] * truth[c] for c in range(n)) % N
                    rels.append(Relation(coeffs, 0, e))
                values, uncertain = solve_log_system(
                    rels, N, n + 1,
                    lambda col, lam: col < len(truth) and truth[col] == lam,
                )
                assert values[:n] == truth

    def test_inconsistent_system_raises(self):
        rels = [Relation({0: 1}, 0, 1), Relation({0: 1}, 0, 2)]
        with pytest.raises(ValueError):
            solve_log_system(rels, 15, 2)

    def test_undetermined_column_flagged(self):
        rels = [Relation({0: 1}, 0, 4)]
        values, uncertain = solve_log_system(rels, 15, 3)
        assert values[0] == 4
        assert 1 in uncertain and 2 in uncertain


# ---------------------------------------------------------------------------
# Whole pipelines.


def check_pipeline(rep, run, targets_seed):
    fb, g, relations, table = run
    ring = rep.ring
    N = rep.order()
    assert table.verify_all(rep)
    assert all(rel.verify(fb, g) for rel in relations)
    # free-relation soundness: member logs reconstructed from the anchor's
    for idx, orb in enumerate(fb.orbits):
        lam_anchor = table.log(fb.column_value(idx))
        for mem in orb.members[:3]:
            lam = rep.p ** mem.shift * lam_anchor
            lam -= fb.scalar_log(mem.scalar) * table.log(ring.embed(fb.g0))
            if mem.ker_weight:
                kcol_val = fb.column_value(fb.kernel_index)
                lam += mem.ker_weight * table.log(kcol_val)
            assert ring.pow(g, lam % N) == ring.el(mem.poly)
    # individual logs: the generator, the unit, random targets
    assert individual_log(rep, fb, table, g, seed=1) == 1
    assert individual_log(rep, fb, table, ring.one(), seed=1) == 0
    rng = random.Random(targets_seed)
    for _ in range(3):
        t = ring.pow(ring.x(), rng.randrange(1, N))
        lam = individual_log(rep, fb, table, t, seed=rng.randrange(100))
        assert ring.pow(g, lam) == t


class TestPipelines:
    def test_kummer_end_to_end(self, kummer_rep, kummer_run):
        check_pipeline(kummer_rep, kummer_run, 11)

    def test_torus_end_to_end(self, torus_rep, torus_run):
        check_pipeline(torus_rep, torus_run, 12)

    def test_artin_schreier_end_to_end(self, as_rep):
        run = compute_logs(as_rep, 2, seed=0)
        check_pipeline(as_rep, run, 13)

    def test_elliptic_end_to_end(self, elliptic_ext):
        run = compute_logs(elliptic_ext.rep, 2, seed=0)
        check_pipeline(elliptic_ext.rep, run, 14)

    def test_pipeline_deterministic(self, as_rep):
        a = compute_logs(as_rep, 2, seed=4)
        b = compute_logs(as_rep, 2, seed=4)
        assert a[2] == b[2]
        assert a[3].logs == b[3].logs

    def test_frobenius_log_consistency(self, kummer_rep, kummer_run):
        # log(x^p) read through the table equals p*log(x)
        fb, g, _, table = kummer_run
        ring = kummer_rep.ring
        lam_x = table.log(ring.x())
        zp = ring.pow(ring.x(), 43)
        lam = individual_log(kummer_rep, fb, table, zp, seed=2)
        assert lam == 43 * lam_x % kummer_rep.order()


# ---------------------------------------------------------------------------
# Serialization.


class TestJson:
    def test_relation_roundtrip(self):
        rel = Relation({3: 17, 0: 2}, 5, 999999999999)
        data = rel.to_json()
        assert data["columns"] == [[0, "2"], [3, "17"]]
        back = Relation.from_json(data)
        assert back == rel

    def test_log_table_roundtrip(self, torus_rep, torus_run):
        _, _, _, table = torus_run
        back = LogTable.from_json(table.to_json(), torus_rep)
        assert back.N == table.N
        assert back.g == table.g
        assert back.logs == table.logs
        assert back.verify_all(torus_rep)
