import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from hdajscc.params import DomainError, ResourceError, UsageError
from hdajscc.quantizer import FAILURE, Codebook, build_codebook, cosine, quantize, quantize_batch


def rng(seed=0):
    return np.random.default_rng(seed)


def test_zero_radius_codebook():
    cb = build_codebook(4, 0.0, 0.0, rng())
    assert cb.M == 1
    assert np.array_equal(cb.codewords, np.zeros((1, 4)))


def test_codebook_norms_exact():
    cb = build_codebook(8, 0.5, 0.5, rng())
    assert cb.M == 16
    np.testing.assert_allclose(np.sum(cb.codewords**2, axis=1), 4.0, rtol=1e-12)


def test_codebook_is_read_only():
    cb = build_codebook(8, 0.5, 0.5, rng())
    with pytest.raises(ValueError):
        cb.codewords[0, 0] = 1.0


def test_codebook_seed_determinism():
    a = build_codebook(16, 0.5, 0.3, rng(42))
    b = build_codebook(16, 0.5, 0.3, rng(42))
    c = build_codebook(16, 0.5, 0.3, rng(43))
    assert a.codewords.tobytes() == b.codewords.tobytes()
    assert a.codewords.tobytes() != c.codewords.tobytes()


def test_codebook_pairwise_inner_products():
    # uniform-sphere ensemble: normalized inner products have mean 0, variance 1/n
    n, vals = 20, []
    g = rng(7)
    for _ in range(40):
        cb = build_codebook(n, 0.25, 1.0, g)
        assert cb.M == 32
        G = cb.codewords @ cb.codewords.T / n
        vals.append(G[np.triu_indices(cb.M, 1)])
    v = np.concatenate(vals)
    assert abs(v.mean()) < 4 / math.sqrt(n * len(v))
    assert v.std() == pytest.approx(1 / math.sqrt(n), rel=0.05)


def test_codebook_memory_guard():
    with pytest.raises(ResourceError):
        build_codebook(64, 0.45, 1.0, rng())


def test_codebook_roundtrip(tmp_path):
    cb = build_codebook(6, 0.5, 0.7, rng(1))
    for name in ("cb.csv", "cb.bin"):
        cb.save(tmp_path / name)
        back = Codebook.load(tmp_path / name)
        assert back == cb
    text = (tmp_path / "cb.csv").read_text().splitlines()
    assert text[0] == "n,M,radius2"
    assert text[1].startswith("6,8,")


def test_cosine_examples():
    v = np.array([0.3, -1.2, 2.0])
    assert cosine(v, v) == pytest.approx(1.0)
    assert cosine([1, 0], [0, 1]) == 0.0
    assert cosine([1, 0], [1, 1]) == pytest.approx(math.sqrt(2) / 2)


def test_cosine_zero_vector():
    with pytest.raises(DomainError):
        cosine([0, 0], [1, 0])


@given(st.lists(st.floats(-1e3, 1e3), min_size=3, max_size=3), st.lists(st.floats(-1e3, 1e3), min_size=3, max_size=3))
def test_cosine_clamped(a, b):
    if np.linalg.norm(a) == 0 or np.linalg.norm(b) == 0:
        return
    assert -1.0 <= cosine(a, b) <= 1.0


def test_wide_band_accepts_all():
    cb = build_codebook(8, 0.5, 0.5, rng(3))
    s = rng(4).standard_normal(8)
    g = rng(5)
    hits = np.zeros(cb.M)
    for _ in range(4000):
        out = quantize(s, cb, 0.3, 2.0, g)
        assert out.candidates == cb.M
        hits[out.index] += 1
    assert stats.chisquare(hits).pvalue > 0.01


def test_unsatisfiable_band_fails():
    cb = Codebook(n=2, M=1, radius2=0.5, codewords=np.array([[0.0, 1.0]]))
    out = quantize(np.array([1.0, 0.0]), cb, 0.9, 0.01, rng())
    assert out.index == FAILURE and out.candidates == 0 and out.failed


def test_zero_radius_short_circuits():
    cb = build_codebook(4, 0.0, 0.0, rng())
    out = quantize(np.zeros(4), cb, 0.0, 0.1, rng())
    assert out.index == 0 and out.candidates == 1


def test_zero_source_on_sphere_is_domain_error():
    cb = build_codebook(4, 0.5, 1.0, rng())
    with pytest.raises(DomainError):
        quantize(np.zeros(4), cb, 0.5, 0.1, rng())


def test_dimension_mismatch():
    cb = build_codebook(4, 0.5, 1.0, rng())
    with pytest.raises(UsageError):
        quantize(np.ones(5), cb, 0.5, 0.1, rng())


def test_batch_matches_single_calls():
    cb = build_codebook(16, 0.5, 0.5, rng(8))
    S = rng(9).standard_normal((50, 16))
    idx, cnt = quantize_batch(S, cb, 0.7, 0.15, rng(10))
    g = rng(10)
    singles = [quantize(s, cb, 0.7, 0.15, g) for s in S]
    assert [o.index for o in singles] == idx.tolist()
    assert [o.candidates for o in singles] == cnt.tolist()


def test_batch_slicing_does_not_change_results(monkeypatch):
    import hdajscc.quantizer as q

    cb = build_codebook(16, 0.5, 0.5, rng(8))
    S = rng(9).standard_normal((40, 16))
    a = quantize_batch(S, cb, 0.7, 0.15, rng(10))
    monkeypatch.setattr(q, "SCORE_BUDGET", 3 * cb.M)
    b = quantize_batch(S, cb, 0.7, 0.15, rng(10))
    assert np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1])


@given(st.integers(0, 2**32 - 1), st.floats(0.0, 0.9), st.floats(0.0, 0.3))
@settings(max_examples=60, deadline=None)
def test_selected_index_obeys_band(seed, target, eps):
    g = rng(seed)
    cb = build_codebook(12, 0.5, 0.4, g)
    s = g.standard_normal(12)
    out = quantize(s, cb, target, eps, g)
    assert (out.index == FAILURE) == (out.candidates == 0)
    if out.index != FAILURE:
        u = cb.codewords[out.index]
        assert abs(cosine(s, u) - target) <= eps + 1e-12
        # quantization error chain, exact consequence of the cosine band
        n = 12
        lhs = abs(np.sum((s - u) ** 2) / n - (s @ s / n - u @ u / n))
        ns, nu = np.linalg.norm(s), np.linalg.norm(u)
        # |s-u|^2 - |s|^2 + |u|^2 = 2|u|^2 - 2<s,u>; the band pins <s,u> to within eps |s||u|
        bound = abs(2 * nu * nu - 2 * target * ns * nu) / n + 2 * eps * ns * nu / n
        assert lhs <= bound + 1e-9


def test_near_orthogonality():
    n, rho = 48, 0.25
    r2 = 1 - 2 ** (-2 * rho)
    g = rng(21)
    cb = build_codebook(n, rho, r2, g)
    S = g.standard_normal((1000, n))
    idx, _ = quantize_batch(S, cb, math.sqrt(r2), 0.05, g)
    ok = idx != FAILURE
    U = cb.codewords[idx[ok]]
    od = np.abs(np.sum((S[ok] - U) * U, axis=1)) / n
    assert od.mean() < 0.05


def test_uniform_selection_chi_square():
    n = 10
    g = rng(30)
    cb = build_codebook(n, 0.6, 1.0, g)
    s = g.standard_normal(n)
    cos = np.array([cosine(s, u) for u in cb.codewords])
    target, eps = 0.3, 0.25
    A = np.flatnonzero(np.abs(cos - target) <= eps)
    assert len(A) >= 2
    hist = dict.fromkeys(A.tolist(), 0)
    for _ in range(10_000):
        hist[quantize(s, cb, target, eps, g).index] += 1
    assert stats.chisquare(list(hist.values())).pvalue > 0.01


def _failure_rate(n, blocks, seed):
    rho = 0.5
    r2 = 0.5
    g = rng(seed)
    cb = build_codebook(n, rho, r2, g)
    S = g.standard_normal((blocks, n))
    idx, _ = quantize_batch(S, cb, math.sqrt(0.5), 0.05, g)
    return np.mean(idx == FAILURE)


@pytest.mark.slow
def test_failure_rate_falls_with_n():
    # oracle (scripts/oracle_measurements.py, 2000 blocks): 0.356 at n=32, 0.275 at n=36
    f32 = _failure_rate(32, 2000, 1)
    f36 = _failure_rate(36, 2000, 2)
    assert f32 < 0.40
    assert f36 < f32
