"""Core uncertain-number type: construction, statistics, arithmetic,
comparison policies, lifting, covariance, KDE and serialization."""

import io
import math
import operator

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import mcparticles.umath as um
from mcparticles import (ComparisonPolicy, Particles, SampleCountError,
                         StaticParticles, UncertainComparisonError, compare,
                         cov, kde, lift_nary, lift_unary, pm,
                         set_default_comparison)
from conftest import bitwise_equal


# -- construction ----------------------------------------------------------------

def test_from_samples_identity():
    p = Particles([1.0, 2.0, 3.0])
    assert p.n == 3
    assert p.samples.tolist() == [1.0, 2.0, 3.0]


def test_single_sample():
    p = Particles([5.0])
    assert p.mean() == 5.0
    assert p.std() == 0.0


def test_sampling_round_trip(rng):
    p = pm(2.0, 0.5, n=64, rng=rng)
    q = Particles(p.samples)
    assert bitwise_equal(p.samples, q.samples)


def test_empty_rejected():
    with pytest.raises(ValueError):
        Particles([])


def test_2d_rejected():
    with pytest.raises(ValueError):
        Particles([[1.0, 2.0]])


def test_constructor_copies():
    src = np.array([1.0, 2.0])
    p = Particles(src)
    src[0] = 99.0
    assert p.samples[0] == 1.0


def test_samples_are_read_only():
    p = Particles([1.0, 2.0])
    with pytest.raises(ValueError):
        p.samples[0] = 0.0


# -- statistics ------------------------------------------------------------------

def test_mean_simple():
    assert Particles([1.0, 2.0, 3.0]).mean() == 2.0


def test_mean_systematic_symmetry():
    # equispaced quantiles of a symmetric distribution cancel pairwise
    p = pm(math.pi, 0.1, n=500, rng=0)
    assert abs(p.mean() - math.pi) < 1e-13


def test_mean_shift():
    p = pm(1.0, 0.3, n=100, rng=1)
    assert math.isclose((p + 1.0).mean(), p.mean() + 1.0, rel_tol=1e-12)


def test_std_constant():
    assert Particles([2.0, 2.0, 2.0]).std() == 0.0


def test_std_matches_printed_reference():
    # N-1 divisor over the midpoint-quantile normal grid
    assert abs(pm(math.pi, 0.1, n=500, rng=0).std() - 0.09997062445203879) < 1e-15


def test_std_scale():
    p = pm(0.0, 1.0, n=200, rng=2)
    assert math.isclose((3.0 * p).std(), 3.0 * p.std(), rel_tol=1e-12)


def test_quantile_interpolation():
    # sorted [1,2,3,4], q=0.5 -> position 1.5 -> 2 + 0.5*(3-2)
    assert Particles([4.0, 1.0, 3.0, 2.0]).quantile(0.5) == 2.5


def test_quantile_endpoints():
    p = Particles([7.0, -1.0, 3.0])
    assert p.quantile(0.0) == -1.0
    assert p.quantile(1.0) == 7.0


def test_quantile_median_symmetric():
    assert abs(pm(0.0, 1.0, n=500, rng=3).quantile(0.5)) < 1e-10


def test_quantile_domain():
    with pytest.raises(ValueError):
        Particles([1.0, 2.0]).quantile(1.5)


def test_summary_invariants():
    p = pm(2.0, 1.0, n=100, rng=4)
    s = p.summary()
    assert math.isclose(s.var, s.std ** 2, rel_tol=1e-12)
    for _, value in s.quantiles:
        assert s.min <= value <= s.max


# -- arithmetic ------------------------------------------------------------------

def test_binary_elementwise():
    p = Particles([1.0, 2.0]) + Particles([10.0, 20.0])
    assert p.samples.tolist() == [11.0, 22.0]


def test_self_correlation_exact_zero():
    p = pm(3.0, 0.7, n=100, rng=5)
    assert (p - p).samples.tolist() == [0.0] * 100


@pytest.mark.parametrize("op", [operator.add, operator.sub, operator.mul,
                                operator.truediv, operator.pow])
def test_ops_match_numpy(op, rng):
    a = Particles(rng.uniform(0.5, 2.0, 32))
    b = Particles(rng.uniform(0.5, 2.0, 32))
    out = op(a, b)
    assert np.allclose(out.samples, op(np.asarray(a.samples), np.asarray(b.samples)),
                       rtol=1e-15)


def test_scalar_both_sides():
    p = Particles([2.0, 4.0])
    assert (10.0 - p).samples.tolist() == [8.0, 6.0]
    assert (8.0 / p).samples.tolist() == [4.0, 2.0]
    assert (2.0 ** p).samples.tolist() == [4.0, 16.0]
    assert (-p).samples.tolist() == [-2.0, -4.0]
    assert abs(p * -1).samples.tolist() == [2.0, 4.0]


def test_mismatched_counts_error():
    with pytest.raises(SampleCountError):
        Particles([1.0, 2.0]) + Particles([1.0, 2.0, 3.0])


def test_unsupported_operand():
    with pytest.raises(TypeError):
        Particles([1.0]) + "nope"


def test_division_by_zero_sample_preserved():
    p = Particles([1.0, 0.0]) / Particles([0.0, 0.0])
    assert math.isinf(p.samples[0])
    assert math.isnan(p.samples[1])


def test_log_of_negative_sample_preserved():
    p = um.log(Particles([-1.0, 1.0]))
    assert math.isnan(p.samples[0])
    assert p.samples[1] == 0.0


def test_nonfinite_stats_report_nonfinite():
    p = Particles([1.0, 2.0]) / 0.0
    assert math.isinf(p.mean()) or math.isnan(p.mean())


def test_inverse_pair():
    p = pm(2.0, 0.3, n=100, rng=6)
    assert np.allclose(um.exp(um.log(p)).samples, p.samples, rtol=1e-14)


def test_float_conversion_refused():
    with pytest.raises(TypeError):
        float(Particles([1.0, 2.0]))


def test_bool_refused():
    with pytest.raises(TypeError):
        bool(Particles([1.0, 2.0]))


def test_static_particles_preserved_by_ops():
    p = StaticParticles([1.0, 2.0])
    assert isinstance(p + 1.0, StaticParticles)
    assert isinstance(um.sin(p), StaticParticles)


def test_rendering():
    assert repr(pm(math.pi, 0.1, n=500, rng=0)) == "P500(3.142 ± 0.1)"
    assert repr(StaticParticles([2.0, 2.0])).startswith("SP2(2")


# -- numpy interop ---------------------------------------------------------------

def test_numpy_ufunc_dispatch(rng):
    p = Particles(rng.normal(size=16))
    assert bitwise_equal(np.sin(p).samples, um.sin(p).samples)
    assert bitwise_equal((np.float64(2.0) * p).samples, (2.0 * p).samples)
    assert bitwise_equal(np.add(1.0, p).samples, (p + 1.0).samples)


def test_numpy_array_broadcast_refused():
    with pytest.raises(TypeError):
        np.arange(3.0) + Particles([1.0, 2.0, 3.0])


# -- comparisons -----------------------------------------------------------------

def test_unanimous_all_true():
    assert pm(10.0, 0.1, n=100, rng=7) > 0


def test_unanimous_all_false():
    assert not (pm(10.0, 0.1, n=100, rng=7) < 0)


def test_unanimous_mixed_reports_split():
    p = pm(0.0, 1.0, n=500, rng=8)
    with pytest.raises(UncertainComparisonError) as err:
        p > 0  # noqa: B015
    assert "50.0%" in str(err.value)


def test_by_mean():
    p = pm(0.1, 1.0, n=500, rng=9)
    assert compare(p, 0.0, ">", ComparisonPolicy.BY_MEAN)


def test_forbidden():
    p = pm(10.0, 0.1, n=10, rng=10)
    with pytest.raises(UncertainComparisonError) as err:
        compare(p, 0.0, ">", ComparisonPolicy.FORBIDDEN)
    assert "lift_unary" in str(err.value)


def test_equality_elementwise():
    p = Particles([1.0, 2.0])
    assert p == Particles([1.0, 2.0])
    assert p != Particles([3.0, 4.0])
    with pytest.raises(UncertainComparisonError):
        p == Particles([1.0, 4.0])  # noqa: B015


def test_default_policy_settable():
    old = set_default_comparison(ComparisonPolicy.BY_MEAN)
    try:
        assert pm(0.1, 1.0, n=100, rng=11) > 0
    finally:
        set_default_comparison(old)


def test_particles_unhashable():
    with pytest.raises(TypeError):
        hash(Particles([1.0]))


# -- lifting ---------------------------------------------------------------------

def negsquare(x):
    return x * x if x > 0 else -(x * x)


def test_lift_negsquare_sign_pattern():
    p = pm(0.0, 1.0, n=500, rng=12)
    out = lift_unary(negsquare)(p)
    assert np.array_equal(np.sign(out.samples), np.sign(p.samples))
    assert abs(out.quantile(0.5)) < 1e-10


def test_lift_identity():
    p = pm(1.0, 0.5, n=50, rng=13)
    assert bitwise_equal(lift_unary(lambda x: x)(p).samples, p.samples)


def test_lift_square_matches_operator_path():
    p = pm(1.0, 0.5, n=100, rng=14)
    assert bitwise_equal(lift_unary(lambda x: x * x)(p).samples, (p * p).samples)


def test_lift_thread_safe_same_result():
    p = pm(1.0, 0.5, n=64, rng=15)
    assert bitwise_equal(lift_unary(math.erf, thread_safe=True)(p).samples,
                         lift_unary(math.erf)(p).samples)


def test_lift_nary_matches_add():
    a = pm(1.0, 0.2, n=50, rng=16)
    b = pm(2.0, 0.3, n=50, rng=17)
    assert bitwise_equal(lift_nary(lambda x, y: x + y)(a, b).samples, (a + b).samples)


def test_lift_nary_branch_matches_maximum():
    a = pm(0.0, 1.0, n=100, rng=18)
    b = pm(0.0, 1.0, n=100, rng=19)
    lifted = lift_nary(lambda x, y: x if x > y else y)(a, b)
    assert bitwise_equal(lifted.samples, um.maximum(a, b).samples)


def test_lift_nary_broadcasts_scalars():
    a = pm(1.0, 0.2, n=25, rng=20)
    assert bitwise_equal(lift_nary(lambda x, c: x * c)(a, 3.0).samples, (a * 3.0).samples)


def test_lift_nary_needs_particles():
    with pytest.raises(TypeError):
        lift_nary(lambda x, y: x + y)(1.0, 2.0)


def test_lift_nary_count_mismatch():
    with pytest.raises(SampleCountError):
        lift_nary(lambda x, y: x + y)(Particles([1.0]), Particles([1.0, 2.0]))


# -- covariance ------------------------------------------------------------------

def test_cov_identical_rank_one():
    p = pm(1.0, 1.0, n=200, rng=21)
    matrix = cov([p, p])
    assert np.allclose(matrix, p.var() * np.ones((2, 2)), rtol=1e-12)


def test_cov_independent_diag():
    rng = np.random.default_rng(22)
    a = pm(1.0, 1.0, n=500, rng=rng)
    b = pm(5.0, 2.0, n=500, rng=rng)
    matrix = cov([a, b])
    assert abs(matrix[0, 0] - 1.0) < 0.05
    assert abs(matrix[1, 1] - 4.0) < 0.05
    assert abs(matrix[0, 1]) < 0.1


def test_cov_affine_transform():
    rng = np.random.default_rng(23)
    p = [pm(1.0, 1.0, n=500, rng=rng), pm(5.0, 2.0, n=500, rng=rng)]
    a_mat = np.array([[0.3, -1.2], [2.0, 0.4]])
    y = [a_mat[0, 0] * p[0] + a_mat[0, 1] * p[1], a_mat[1, 0] * p[0] + a_mat[1, 1] * p[1]]
    expected = a_mat @ np.diag([1.0, 4.0]) @ a_mat.T
    err = np.linalg.norm(cov(y) - expected) / np.linalg.norm(expected)
    assert err < 0.05


def test_cov_count_mismatch():
    with pytest.raises(SampleCountError):
        cov([Particles([1.0, 2.0]), Particles([1.0, 2.0, 3.0])])


# -- KDE -------------------------------------------------------------------------

def test_kde_peaks_at_constant():
    p = Particles([2.0] * 50)
    grid = np.linspace(0.0, 4.0, 81)
    out = kde(p, grid)
    assert out[np.argmax(out[:, 1]), 0] == pytest.approx(2.0, abs=0.026)


def test_kde_integrates_to_one():
    p = pm(0.0, 1.0, n=300, rng=24)
    grid = np.linspace(-8.0, 8.0, 801)
    out = kde(p, grid)
    assert np.trapezoid(out[:, 1], out[:, 0]) == pytest.approx(1.0, rel=0.01)


def test_kde_standard_normal_density():
    p = pm(0.0, 1.0, n=500, rng=25)
    out = kde(p, np.array([0.0]))
    assert out[0, 1] == pytest.approx(0.3989422804014327, rel=0.10)


def test_kde_rejects_bad_bandwidth():
    with pytest.raises(ValueError):
        kde(Particles([1.0, 2.0]), np.array([0.0, 1.0]), bandwidth=-1.0)


def test_kde_rejects_unsorted_grid():
    with pytest.raises(ValueError):
        kde(Particles([1.0, 2.0]), np.array([1.0, 0.0]))


# -- serialization ---------------------------------------------------------------

def test_csv_round_trip_bit_exact(rng):
    p = Particles(rng.normal(size=40))
    buf = io.StringIO()
    p.to_csv(buf)
    q = Particles.from_csv(io.StringIO(buf.getvalue()))
    assert bitwise_equal(p.samples, q.samples)


def test_csv_round_trip_nonfinite():
    p = Particles([math.inf, -math.inf, math.nan, 1e-300])
    buf = io.StringIO()
    p.to_csv(buf)
    q = Particles.from_csv(io.StringIO(buf.getvalue()))
    assert bitwise_equal(p.samples, q.samples)


def test_csv_header_checked():
    with pytest.raises(ValueError):
        Particles.from_csv(io.StringIO("a,b\r\n0,1.0\r\n"))


def test_json_round_trip_bit_exact(rng):
    p = Particles(rng.normal(size=40) * 1e10)
    assert bitwise_equal(Particles.from_json(p.to_json()).samples, p.samples)


def test_csv_file_paths(tmp_path, rng):
    p = Particles(rng.normal(size=10))
    path = tmp_path / "samples.csv"
    p.to_csv(path)
    assert bitwise_equal(Particles.from_csv(path).samples, p.samples)
    raw = path.read_bytes()
    assert raw.startswith(b"index,value")
    assert b"\r\n" in raw


# -- property tests ---------------------------------------------------------------

finite_floats = st.floats(min_value=-10.0, max_value=10.0,
                          allow_nan=False, allow_infinity=False)
sample_lists = st.lists(finite_floats, min_size=1, max_size=16)

_UNARY = {
    "sin": um.sin,
    "cos": um.cos,
    "tan": um.tan,
    "exp": um.exp,
    "neg": operator.neg,
    "sqrtabs": lambda x: um.sqrt(abs(x)),
}
_BINARY = {
    "add": operator.add,
    "sub": operator.sub,
    "mul": operator.mul,
    "safediv": lambda l, r: l / (r * r + 0.5),
}

_trees = st.recursive(
    st.one_of(st.just(("p",)), st.tuples(st.just("c"), finite_floats)),
    lambda children: st.one_of(
        st.tuples(st.just("u"), st.sampled_from(sorted(_UNARY)), children),
        st.tuples(st.just("b"), st.sampled_from(sorted(_BINARY)), children, children)),
    max_leaves=12)


def _eval_tree(tree, x):
    tag = tree[0]
    if tag == "p":
        return x
    if tag == "c":
        return tree[1]
    if tag == "u":
        return _UNARY[tree[1]](_eval_tree(tree[2], x))
    return _BINARY[tree[1]](_eval_tree(tree[2], x), _eval_tree(tree[3], x))


@given(samples=sample_lists, tree=_trees)
def test_index_alignment_oracle(samples, tree):
    # evaluating a whole expression tree batched must equal evaluating it
    # sample by sample with plain floats, bit for bit
    p = Particles(samples)
    batched = _eval_tree(tree, p)
    if not isinstance(batched, Particles):
        return  # tree without the uncertain leaf: nothing to align
    scalar = [_eval_tree(tree, float(v)) for v in p.samples]
    assert bitwise_equal(batched.samples, scalar)


@given(samples=sample_lists, c=finite_floats)
def test_broadcast_consistency(samples, c):
    p = Particles(samples)
    assert bitwise_equal((p + c).samples, (p + Particles([c] * p.n)).samples)


@given(samples=st.lists(finite_floats, min_size=2, max_size=16),
       a=st.floats(min_value=-5.0, max_value=5.0, allow_nan=False),
       b=st.floats(min_value=-5.0, max_value=5.0, allow_nan=False))
def test_stats_equivariance(samples, a, b):
    p = Particles(samples)
    q = a * p + b
    assert math.isclose(q.mean(), a * p.mean() + b, rel_tol=1e-12, abs_tol=1e-12)
    assert math.isclose(q.std(), abs(a) * p.std(), rel_tol=1e-12, abs_tol=1e-12)


@given(samples=st.lists(st.floats(min_value=-1.3, max_value=1.3, allow_nan=False),
                        min_size=1, max_size=16))
def test_self_correlation_tan_identity(samples):
    p = Particles(samples)
    residual = um.sin(p) / um.cos(p) - um.tan(p)
    assert abs(residual).max() <= 1e-12


@given(neg=st.lists(st.floats(min_value=-10.0, max_value=-0.1), min_size=1, max_size=8),
       pos=st.lists(st.floats(min_value=0.1, max_value=10.0), min_size=1, max_size=8))
def test_unanimous_never_answers_mixed(neg, pos):
    p = Particles(neg + pos)
    for rel in ("<", "<=", ">", ">="):
        with pytest.raises(UncertainComparisonError):
            compare(p, 0.0, rel, ComparisonPolicy.UNANIMOUS)


@given(st.integers(min_value=0, max_value=2 ** 32 - 1), st.integers(min_value=2, max_value=4))
def test_cov_symmetric_psd(seed, k):
    rng = np.random.default_rng(seed)
    base = [Particles(rng.normal(size=64)) for _ in range(k)]
    mixed = [sum((base[j] * float(rng.normal()) for j in range(k)), start=base[i])
             for i in range(k)]
    matrix = cov(mixed)
    assert np.allclose(matrix, matrix.T, atol=1e-12)
    assert np.linalg.eigvalsh(matrix).min() >= -1e-10
