import numpy as np
from hypothesis import assume
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

# magnitudes below 1e-9 snap to zero: products of such entries underflow long
# before they say anything about the algebra
entries = st.floats(min_value=-2.0, max_value=2.0, allow_nan=False, allow_infinity=False).map(
    lambda v: 0.0 if abs(v) < 1e-9 else v
)
christoffels = arrays(np.float64, (2, 2, 2), elements=entries)
int_christoffels = arrays(np.int64, (2, 2, 2), elements=st.integers(-6, 6))


@st.composite
def torsion_free(draw):
    g = draw(christoffels)
    g[1, 0] = g[0, 1]
    return g


@st.composite
def group_elements(draw, positive=True, min_det=0.05):
    m = draw(arrays(np.float64, (2, 2), elements=entries))
    det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
    assume(abs(det) > min_det)
    if positive and det < 0:
        m[0] = -m[0]
    return m
