import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from eisencont.rootdata import (Composition, InvalidRepresentativeError, RootVector, WeylElem,
                                chamber_separation, compositions, coroot, delta_P, double_coset_reps,
                                omega, omega_semi, project, simple_roots, subordinate_parabolics)


# ------------------------------------------------------------ brute force

def levi_group(P: Composition):
    """All permutations preserving every block of P."""
    out = []
    for perm in itertools.permutations(range(P.n)):
        if all(P.block_of[perm[i]] == P.block_of[i] for i in range(P.n)):
            out.append(WeylElem(perm))
    return out


def brute_double_cosets(P: Composition, Q: Composition):
    WP, WQ = levi_group(P), levi_group(Q)
    seen, cosets = set(), []
    for perm in itertools.permutations(range(P.n)):
        w = WeylElem(perm)
        if w in seen:
            continue
        orbit = {q * w * p for q in WQ for p in WP}
        seen |= orbit
        cosets.append(orbit)
    return cosets


def increasing_on_blocks(w: WeylElem, P: Composition) -> bool:
    return all(w.perm[b[k]] < w.perm[b[k + 1]] for b in P.blocks for k in range(len(b) - 1))


def brute_omega_semi(P: Composition, Q: Composition):
    """w increasing on P-blocks and every Q-block inside the image of some P-block."""
    out = set()
    for perm in itertools.permutations(range(P.n)):
        w = WeylElem(perm)
        if not increasing_on_blocks(w, P):
            continue
        images = [{w.perm[i] for i in b} for b in P.blocks]
        if all(any(set(c) <= img for img in images) for c in Q.blocks):
            out.add(w)
    return out


def brute_omega(P: Composition, Q: Composition):
    """w increasing on P-blocks carrying every P-block onto a Q-block."""
    q_blocks = {frozenset(c) for c in Q.blocks}
    out = set()
    for perm in itertools.permutations(range(P.n)):
        w = WeylElem(perm)
        if increasing_on_blocks(w, P) and all(frozenset(w.perm[i] for i in b) in q_blocks for b in P.blocks):
            out.add(w)
    return out


def pairs_up_to(n_max):
    for n in range(1, n_max + 1):
        comps = list(compositions(n))
        for P in comps:
            for Q in comps:
                yield P, Q


composition_strategy = st.integers(1, 5).flatmap(
    lambda n: st.tuples(st.sampled_from(list(compositions(n))), st.sampled_from(list(compositions(n)))))


# ------------------------------------------------------------ compositions

def test_composition_basics():
    P = Composition.parse("2,1,3")
    assert P.n == 6 and P.blocks == ((0, 1), (2,), (3, 4, 5))
    assert Composition((1,) * 6).refines(P) and P.refines(Composition((3, 3)))
    assert not P.refines(Composition((1, 5)))
    assert len(list(compositions(5))) == 16
    with pytest.raises(ValueError):
        Composition.parse("2,0")
    with pytest.raises(ValueError):
        Composition.parse("2,1", n=4)


def test_root_vector_requires_zero_sum():
    with pytest.raises(ValueError):
        RootVector((1, 0, 0))


# ------------------------------------------------------------ simple roots

def test_simple_roots_examples():
    assert simple_roots(Composition((1, 1, 1))) == []
    assert simple_roots(Composition((2, 1))) == [RootVector.root(3, 0, 1)]
    assert set(simple_roots(Composition((2, 2)))) == {RootVector.root(4, 0, 1), RootVector.root(4, 2, 3)}


def test_simple_roots_match_brute_force_over_all_roots():
    for n in range(1, 6):
        for P in compositions(n):
            expected = set()
            for i, j in itertools.permutations(range(n), 2):
                # simple root of the Levi: positive, adjacent, inside one block
                if j == i + 1 and P.block_of[i] == P.block_of[j]:
                    expected.add(RootVector.root(n, i, j))
            assert set(simple_roots(P)) == expected


# ------------------------------------------------------------ Delta_P

def test_delta_P_rank_one():
    (alpha, coeffs), = delta_P(Composition((1, 1)))
    assert alpha == RootVector.root(2, 0, 1) and coeffs == (1,)


def test_delta_P_two_one_is_projection_of_second_simple_root():
    (alpha, coeffs), = delta_P(Composition((2, 1)))
    h = Fraction(1, 2)
    assert alpha.coords == (h, h, -1)
    assert coeffs == (h, 1)
    # the expansion reconstructs alpha
    recon = [Fraction(0)] * 3
    for k, cf in enumerate(coeffs):
        recon[k] += cf
        recon[k + 1] -= cf
    assert tuple(recon) == alpha.coords


def test_delta_P_positivity_exhaustive():
    for n in range(2, 7):
        for P in compositions(n):
            if len(P.parts) == 1:
                with pytest.raises(ValueError):
                    delta_P(P)
                continue
            entries = delta_P(P)
            assert len(entries) == len(P.parts) - 1
            for b, (alpha, coeffs) in enumerate(entries):
                assert all(cf >= 0 for cf in coeffs)
                assert alpha.pair(coroot(P, b)) > 0
                # alpha is block-constant: fixed by the projection
                assert project(P, alpha) == alpha


# ------------------------------------------------------------ double cosets

def test_double_cosets_small_examples():
    P0 = Composition((1, 1, 1))
    assert len(double_coset_reps(P0, P0)) == 6
    P, Q = Composition((2, 1)), Composition((1, 2))
    assert len(double_coset_reps(P, Q)) == len(brute_double_cosets(P, Q))
    R = Composition((2, 2))
    assert len(double_coset_reps(R, R)) == len(brute_double_cosets(R, R)) == 3


def test_double_coset_counts_and_minimal_length_exhaustive():
    for P, Q in pairs_up_to(5):
        reps = double_coset_reps(P, Q)
        cosets = brute_double_cosets(P, Q)
        assert len(reps) == len(cosets)
        for orbit in cosets:
            lengths = sorted(w.length() for w in orbit)
            assert lengths[0] < lengths[1] if len(lengths) > 1 else True
            shortest = min(orbit, key=WeylElem.length)
            inside = [w for w in reps if w in orbit]
            assert inside == [shortest]


# ------------------------------------------------------------ subordinate parabolics

def test_subordinate_identity():
    P = Composition((2, 1, 2))
    assert subordinate_parabolics(WeylElem.identity(5), P, P) == (P, P)
    Q = Composition((1, 4))
    Pw, Qw = subordinate_parabolics(WeylElem.identity(5), P, Q)
    assert Pw == Qw == Composition((1, 1, 1, 2))


def test_subordinate_two_one_versus_one_two():
    P, Q = Composition((2, 1)), Composition((1, 2))
    nontrivial = [w for w in double_coset_reps(P, Q) if w != WeylElem.identity(3)]
    # the unique nontrivial rep that moves the size-2 block onto the size-2 block
    w = WeylElem((1, 2, 0))
    assert w in nontrivial
    Pw, Qw = subordinate_parabolics(w, P, Q)
    assert Pw == P and Qw == Q


def brute_levi_intersection(w, P, Q):
    winv = w.inverse()
    labels = [(P.block_of[i], Q.block_of[w.perm[i]]) for i in range(P.n)]
    groups = {}
    for i, lab in enumerate(labels):
        groups.setdefault(lab, []).append(i)
    pieces = sorted(groups.values(), key=lambda g: g[0])
    qlabels = [(Q.block_of[j], P.block_of[winv.perm[j]]) for j in range(P.n)]
    qgroups = {}
    for j, lab in enumerate(qlabels):
        qgroups.setdefault(lab, []).append(j)
    qpieces = sorted(qgroups.values(), key=lambda g: g[0])
    return tuple(len(g) for g in pieces), tuple(len(g) for g in qpieces)


def test_subordinate_parabolics_exhaustive():
    for P, Q in pairs_up_to(5):
        for w in double_coset_reps(P, Q):
            Pw, Qw = subordinate_parabolics(w, P, Q)
            assert (Pw.parts, Qw.parts) == brute_levi_intersection(w, P, Q)
            assert sorted(Pw.parts) == sorted(Qw.parts)
            assert Pw.refines(P) and Qw.refines(Q)


def test_subordinate_rejects_non_representative():
    P = Composition((2, 1))
    with pytest.raises(InvalidRepresentativeError):
        subordinate_parabolics(WeylElem((1, 0, 2)), P, P)


# ------------------------------------------------------------ Omega

def test_omega_examples():
    P, Q = Composition((2, 1)), Composition((1, 2))
    assert omega(P, Q) == [WeylElem((1, 2, 0))]
    S2 = Composition((1, 1))
    assert set(omega(S2, S2)) == {WeylElem((0, 1)), WeylElem((1, 0))}
    for n in range(1, 6):
        for R in compositions(n):
            assert WeylElem.identity(n) in omega_semi(R, R)


def test_omega_sets_match_brute_force():
    for P, Q in pairs_up_to(5):
        assert set(omega_semi(P, Q)) == brute_omega_semi(P, Q)
        assert set(omega(P, Q)) == brute_omega(P, Q)


def test_omega_nonempty_iff_same_part_multiset():
    for P, Q in pairs_up_to(6):
        assert bool(omega(P, Q)) == (sorted(P.parts) == sorted(Q.parts))


@given(composition_strategy)
def test_omega_inverse_symmetry(pair):
    P, Q = pair
    assert {w.inverse() for w in omega(P, Q)} == set(omega(Q, P))
    for w in omega(P, Q):
        assert w in omega_semi(P, Q) and w.inverse() in omega_semi(Q, P)


@given(composition_strategy)
def test_reps_are_positive_on_levi_roots(pair):
    P, Q = pair
    for w in double_coset_reps(P, Q):
        for a in simple_roots(P):
            assert w.act(a).is_positive_root()
        for a in simple_roots(Q):
            assert w.inverse().act(a).is_positive_root()


# ------------------------------------------------------------ chamber separation

def independent_separation_check(c, cprime, P, Q, samples, seed):
    """Fresh random lambda with all P-pairings > c'; every w != e in Omega(P;Q)
    must send it to a Q-pairing below -c.  Independent of the library sampler."""
    rng = np.random.default_rng(seed)
    nb = len(P.parts) - 1
    ws = [w for w in omega_semi(P, Q) if w != WeylElem.identity(P.n)]
    sizes = np.array(P.parts)
    q_cuts = [blk[-1] for blk in Q.blocks[:-1]]
    for _ in range(samples):
        jumps = cprime * (1 + 1e-9) + rng.gamma(0.7, 1.0, nb) * cprime * rng.choice([0.01, 1.0, 10.0])
        # block values with prescribed consecutive differences, then shift to sum zero
        vals = np.concatenate([[0.0], -np.cumsum(jumps)])
        vals -= np.dot(sizes, vals) / P.n
        lam = np.repeat(vals, sizes)
        for b, blk in enumerate(P.blocks[:-1]):
            assert lam[blk[-1]] - lam[blk[-1] + 1] > cprime
        for w in ws:
            wl = np.empty_like(lam)
            wl[list(w.perm)] = lam
            assert any(wl[i] - wl[i + 1] < -c for i in q_cuts), (w, lam)


def test_chamber_separation_rank_one_sign_flip():
    S2 = Composition((1, 1))
    assert chamber_separation(1.0, S2, S2) == 1.0
    independent_separation_check(1.0, 1.0, S2, S2, 2000, seed=5)


@pytest.mark.parametrize("c, parts_p, parts_q", [(10.0, (1, 1, 1), (1, 1, 1)), (5.0, (2, 1, 1), (1, 1, 2))])
def test_chamber_separation_validates_on_fresh_samples(c, parts_p, parts_q):
    P, Q = Composition(parts_p), Composition(parts_q)
    cprime = chamber_separation(c, P, Q, trials=1000, seed=1)
    assert cprime >= c
    independent_separation_check(c, cprime, P, Q, 10_000, seed=99)


def test_chamber_separation_rejects_maximal_parabolic():
    with pytest.raises(ValueError):
        chamber_separation(1.0, Composition((3,)), Composition((3,)))
