import numpy as np
import pytest
from hypothesis import given, settings as hyp_settings
from hypothesis import strategies as st

from app.core.errors import CapacityError, UsageError
from app.models.field import get_field
from app.models.matrix import MatrixQ
from app.models.subspace import Codebook, CodebookMode, DecodeVerdict
from app.services.subspace_service import (
    build_random_code,
    closed_form_region_bound,
    decode,
    decoding_region_bound,
    decoding_region_count,
    distance_profile,
    encode,
    enumerate_all_subspaces,
    enumerate_grassmannian,
    gaussian_coeff,
    gaussian_coeff_bounds_check,
    injection_distance,
    list_decode,
    load_codebook,
    sample_uniform_subspace,
    save_codebook,
    span,
    stack_distances,
    zero_subspace,
)


def _span(spec, rows, n):
    return span(MatrixQ.from_rows(spec, rows, cols=n))


def test_gaussian_coefficients() -> None:
    assert gaussian_coeff(4, 2, 2) == 35
    assert gaussian_coeff(3, 1, 2) == 7
    assert gaussian_coeff(4, 2, 3) == 130
    for n in range(6):
        assert gaussian_coeff(n, 0, 3) == gaussian_coeff(n, n, 3) == 1
        for k in range(n + 1):
            assert gaussian_coeff(n, k, 4) == gaussian_coeff(n, n - k, 4)
    with pytest.raises(UsageError):
        gaussian_coeff(3, 4, 2)


def test_grassmannian_enumeration_matches_count() -> None:
    spec = get_field(3)
    for k in range(4):
        spaces = list(enumerate_grassmannian(spec, 3, k))
        assert len(spaces) == gaussian_coeff(3, k, 3)
        assert len({s.basis.data.tobytes() for s in spaces}) == len(spaces)
    assert len(enumerate_all_subspaces(get_field(2), 4)) == 67


def test_enumeration_budget(budgets) -> None:
    budgets(enumeration_budget=10)
    with pytest.raises(CapacityError):
        list(enumerate_grassmannian(get_field(2), 4, 2))


def test_bounds_check_small_grid() -> None:
    assert all(
        gaussian_coeff_bounds_check(n, k, q)
        for q in (2, 3, 4)
        for n in range(1, 9)
        for k in range(n + 1)
    )


def test_injection_distance_examples(gf2) -> None:
    e1 = _span(gf2, [[1, 0, 0, 0]], 4)
    e12 = _span(gf2, [[1, 0, 0, 0], [0, 1, 0, 0]], 4)
    e34 = _span(gf2, [[0, 0, 1, 0], [0, 0, 0, 1]], 4)
    assert injection_distance(e12, e12) == 0
    assert injection_distance(e1, e12) == 1
    assert injection_distance(e12, e34) == 2
    assert injection_distance(zero_subspace(gf2, 4), e12) == 2
    with pytest.raises(UsageError):
        injection_distance(e1, zero_subspace(gf2, 3))


def test_span_is_canonical(gf2) -> None:
    a = _span(gf2, [[1, 1, 0], [0, 1, 1]], 3)
    b = _span(gf2, [[1, 0, 1], [1, 1, 0], [0, 1, 1]], 3)
    assert a == b
    assert a.dim == 2


def test_stack_distances_agree_with_pairwise(rng) -> None:
    spec = get_field(3)
    cb = build_random_code(spec, 5, 2, 40, rng)
    for k in (0, 1, 2, 3):
        y = sample_uniform_subspace(spec, 5, k, rng)
        expected = [injection_distance(cw, y) for cw in cb.codewords]
        assert stack_distances(spec, cb.stack, y).tolist() == expected


def test_distinct_codebook(rng) -> None:
    spec = get_field(2)
    cb = build_random_code(spec, 4, 2, 35, rng, CodebookMode.DISTINCT)
    assert cb.M == 35
    assert cb.collisions == 0
    assert len({cw.basis.data.tobytes() for cw in cb.codewords}) == 35
    with pytest.raises(UsageError):
        build_random_code(spec, 4, 2, 36, rng, CodebookMode.DISTINCT)


def test_random_codebook_counts_collisions(rng) -> None:
    cb = build_random_code(get_field(2), 2, 1, 10, rng)
    assert cb.collisions >= 7  # only three lines in F_2^2
    assert cb.mode is CodebookMode.RANDOM


def test_codebook_validation(gf2) -> None:
    with pytest.raises(UsageError):
        Codebook(gf2, 3, 1, ())
    with pytest.raises(UsageError):
        Codebook(gf2, 3, 1, (_span(gf2, [[1, 0, 0], [0, 1, 0]], 3),))
    with pytest.raises(UsageError):
        build_random_code(gf2, 2, 3, 4, np.random.default_rng(0))


def test_decode_verdicts(gf2) -> None:
    a = _span(gf2, [[1, 0, 0, 0], [0, 1, 0, 0]], 4)
    b = _span(gf2, [[1, 0, 0, 0], [0, 0, 1, 0]], 4)
    c = _span(gf2, [[0, 0, 1, 0], [0, 0, 0, 1]], 4)
    cb = Codebook(gf2, 4, 2, (a, b, c), CodebookMode.DISTINCT)

    assert encode(cb, 1) == b.basis
    unique = decode(cb, a, 0)
    assert unique.verdict is DecodeVerdict.UNIQUE and unique.index == 0 and unique.ok

    line = _span(gf2, [[1, 0, 0, 0]], 4)
    ambiguous = decode(cb, line, 1)
    assert ambiguous.verdict is DecodeVerdict.AMBIGUOUS
    assert ambiguous.candidates == (0, 1)

    far = _span(gf2, [[0, 1, 0, 0], [0, 0, 0, 1]], 4)
    assert distance_profile(cb, far).tolist() == [1, 2, 1]
    assert decode(cb, far, 0).verdict is DecodeVerdict.NONE_WITHIN_RADIUS
    assert list_decode(cb, far, 1) == [0, 2]
    with pytest.raises(UsageError):
        encode(cb, 3)


def test_decode_budget(budgets, rng) -> None:
    cb = build_random_code(get_field(2), 4, 2, 8, rng)
    budgets(decode_budget=4)
    with pytest.raises(CapacityError):
        decode(cb, cb.codewords[0], 1)


@pytest.mark.parametrize(
    ("C", "n", "z_w", "q", "count"),
    [(2, 3, 1, 2, 7), (2, 4, 1, 2, 19), (3, 4, 1, 2, 15)],
)
def test_decoding_region_counts(C: int, n: int, z_w: int, q: int, count: int) -> None:
    spec = get_field(q)
    y = span(MatrixQ(spec, np.eye(C, n, dtype=np.int64)))
    exact = decoding_region_count(spec, C, n, z_w, y)
    assert exact == count
    assert exact <= decoding_region_bound(C, n, z_w, q) + 1
    assert exact <= closed_form_region_bound(C, n, z_w, q)


def test_region_bound_values() -> None:
    assert decoding_region_bound(2, 4, 1, 2) == 3 * 15
    with pytest.raises(UsageError):
        decoding_region_bound(2, 4, 0, 2)


def test_codebook_roundtrip(tmp_path, rng) -> None:
    spec = get_field(2, 2)
    cb = build_random_code(spec, 4, 2, 6, rng, CodebookMode.DISTINCT)
    loaded = load_codebook(save_codebook(cb, tmp_path / "book.json"))
    assert loaded.field == spec
    assert (loaded.n, loaded.C, loaded.M, loaded.mode) == (4, 2, 6, CodebookMode.DISTINCT)
    assert all(a == b for a, b in zip(loaded.codewords, cb.codewords, strict=True))


@hyp_settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), radius=st.integers(0, 2), dim_y=st.integers(0, 3))
def test_decode_is_permutation_equivariant(seed: int, radius: int, dim_y: int) -> None:
    spec = get_field(2)
    rng = np.random.default_rng(seed)
    cb = build_random_code(spec, 5, 2, 12, rng, CodebookMode.DISTINCT)
    order = rng.permutation(cb.M)
    shuffled = Codebook(spec, 5, 2, tuple(cb.codewords[i] for i in order), cb.mode)
    y = sample_uniform_subspace(spec, 5, dim_y, rng)

    plain = decode(cb, y, radius)
    permuted = decode(shuffled, y, radius)
    assert permuted.verdict is plain.verdict
    assert sorted(int(order[i]) for i in permuted.candidates) == list(plain.candidates)
    if plain.ok:
        assert int(order[permuted.index]) == plain.index
