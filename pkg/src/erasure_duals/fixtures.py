"""Small hand-checkable frames used by tests, scripts and the CLI docs."""
import numpy as np


def two_in_plane() -> np.ndarray:
    """Columns e1, e1, e2 in R^2; canonical dual is (e1/2, e1/2, e2)."""
    return np.array([[1.0, 1.0, 0.0], [0.0, 0.0, 1.0]])


def repeated_e1(r: int = 3) -> tuple[np.ndarray, np.ndarray]:
    """Frame (e1, e1, e1, e2, ..., e_r) and the non-canonical dual
    (e1, -e1/2, e1/2, e2, ..., e_r).

    Erasing the first element keeps the MRC, yet <z_1, x_1> = 1, so the Gram
    matrix is zero, I - z_1 x_1^H kills e1 and the first iterative
    denominator vanishes.
    """
    if r < 2:
        raise ValueError("need r >= 2")
    x = np.zeros((r, r + 2))
    x[0, :3] = 1.0
    x[1:, 3:] = np.eye(r - 1)
    z = x.copy()
    z[0, 1] = -0.5
    z[0, 2] = 0.5
    return x, z
