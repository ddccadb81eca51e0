import math

from hypothesis import assume, given, settings
from hypothesis import strategies as st

from mpfkit import mpf
from mpfkit.eft import fma, renorm5, two_prod, two_prod_dekker, two_sum, vec_sum
from mpfkit.mpf import Precision, from_decimal_string, is_normalized, to_decimal_string
from mpfkit.oracle import DyadicReal, o_from_components, o_round_to_binary64

D = DyadicReal.from_float
finite = st.floats(allow_nan=False, allow_infinity=False, min_value=-2.0 ** 1000, max_value=2.0 ** 1000)
moderate = st.floats(allow_nan=False, allow_infinity=False, min_value=-2.0 ** 400, max_value=2.0 ** 400)
unit = st.floats(min_value=1.0, max_value=2.0, exclude_max=True)


@given(finite, finite)
def test_two_sum_exact(a, b):
    s, e = two_sum(a, b)
    assert D(s) + D(e) == D(a) + D(b)
    assert s == o_round_to_binary64(D(a) + D(b)) or s == 0.0


@given(moderate, moderate)
def test_two_prod_exact_on_domain(a, b):
    assume(a == 0.0 or b == 0.0 or abs(a * b) >= 2.0 ** -969)
    s, e = two_prod(a, b)
    assert D(s) + D(e) == D(a) * D(b)
    assert (s, e) == two_prod_dekker(a, b)


@given(finite, finite, finite)
def test_fma_single_rounding(a, b, c):
    exact = D(a) * D(b) + D(c)
    try:
        expected = o_round_to_binary64(exact)
    except OverflowError:
        assert math.isinf(fma(a, b, c))
        return
    got = fma(a, b, c)
    assert got == expected


@given(st.lists(finite, min_size=2, max_size=8))
def test_vec_sum_preserves_value(xs):
    assume(all(abs(x) < 2.0 ** 900 for x in xs))
    assert o_from_components(vec_sum(xs)) == o_from_components(xs)


@given(unit, st.floats(-1, 1), st.floats(-1, 1), st.floats(-1, 1), st.floats(-1, 1))
def test_renorm5_value_and_shape(c0, u1, u2, u3, u4):
    c = [c0, c0 * u1 * 2.0 ** -53]
    c += [c[-1] * u2 * 2.0 ** -53, c[-1] * u2 * u3 * 2.0 ** -106, c[-1] * u2 * u3 * u4 * 2.0 ** -159]
    r = renorm5(*c)
    err = abs((o_from_components(r) - o_from_components(c)).to_fraction())
    assert err <= abs(o_from_components(c).to_fraction()) * 2.0 ** -209
    assert is_normalized(r)


@st.composite
def mp_values(draw, precision):
    width = Precision.parse(precision).width
    lead = draw(unit) * draw(st.sampled_from([-1.0, 1.0])) * 2.0 ** draw(st.integers(-30, 30))
    comps = [lead]
    for _ in range(width - 1):
        comps.append(comps[-1] * 2.0 ** -54 * draw(st.floats(-1, 1)))
    return mpf.SCALAR_TYPES[Precision.parse(precision)](*comps)


@settings(max_examples=200)
@given(st.data(), st.sampled_from(["dd", "td", "qd"]))
def test_decimal_roundtrip(data, prec):
    x = data.draw(mp_values(prec))
    assume(is_normalized(x))
    back = from_decimal_string(to_decimal_string(x), prec)
    assert back.to_dyadic() == x.to_dyadic()
    assert back.c == x.c


@given(st.data(), st.sampled_from(["dd", "td", "qd"]))
def test_add_mul_commute_and_normalize(data, prec):
    x, y = data.draw(mp_values(prec)), data.draw(mp_values(prec))
    assume(is_normalized(x) and is_normalized(y))
    for op in (mpf.add, mpf.mul):
        r = op(x, y)
        assert r == op(y, x)
        assert is_normalized(r)
    assert mpf.sub(x, x).to_dyadic() == 0


@given(finite)
def test_oracle_roundtrip(x):
    assert o_round_to_binary64(o_from_components([x])) == x
