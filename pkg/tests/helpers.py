import numpy as np
from hypothesis import strategies as st

from threelevel import DriveParams
from threelevel.errors import Flag

rabi = st.floats(0.1, 2.0)
detuning = st.floats(0.0, 50.0)
phase = st.floats(0.0, 2 * np.pi, exclude_max=True)
times = st.floats(0.0, 20.0)


@st.composite
def drive_params(draw, delta=detuning):
    return DriveParams(draw(rabi), draw(rabi), draw(delta), draw(phase), draw(phase))


def as_array(cells):
    return np.array([np.nan if isinstance(c, Flag) else c for c in cells], dtype=float)


def local_maxima(x):
    """Interior indices with x[i-1] < x[i] >= x[i+1]; NaN neighbours disqualify."""
    x = np.asarray(x, dtype=float)
    i = np.arange(1, len(x) - 1)
    ok = (x[i] > x[i - 1]) & (x[i] >= x[i + 1]) & np.isfinite(x[i - 1]) & np.isfinite(x[i + 1])
    return i[ok]


def local_minima(x):
    return local_maxima(-np.asarray(x, dtype=float))


def align_phase(a, b):
    """Rotate b by the global phase that best matches it to a."""
    ov = np.vdot(b, a)
    return b * (ov / abs(ov)) if abs(ov) > 0 else b
