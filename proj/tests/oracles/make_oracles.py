"""Independent reference values for the C++ tests.

Every quantity is computed here from first principles with NumPy (counting
loops, explicit dense matrices, full SVDs).  The printed values are pasted
into tests/test_oracles.cpp; rerun this script to regenerate them.
"""

import numpy as np


def pencil(n):
    n1 = (n + 2) // 2
    return n1, n + 1 - n1


def weights_by_counting(n1, n2):
    w = [0] * (n1 + n2 - 1)
    for i in range(n1):
        for j in range(n2):
            w[i + j] += 1
    return w


def hankel(z, n1, n2):
    return np.array([[z[i + j] for j in range(n2)] for i in range(n1)])


def adjoint(Z):
    n1, n2 = Z.shape
    out = np.zeros(n1 + n2 - 1, dtype=complex)
    for i in range(n1):
        for j in range(n2):
            out[i + j] += Z[i, j]
    return out


def test_vector(n, a, b, c):
    k = np.arange(n)
    return (a * k + 1) + 1j * np.sin(b * k + c)


def fmt(v):
    return ", ".join("{%.17g, %.17g}" % (x.real, x.imag) for x in v)


def fmt_real(v):
    return ", ".join("%.17g" % x for x in v)


def main():
    for n in (5, 8, 127):
        n1, n2 = pencil(n)
        w = weights_by_counting(n1, n2)
        print(f"n={n}: n1={n1} n2={n2} c_s={max(n / n1, n / n2):.17g} sum={sum(w)}")
        if n < 10:
            print("  w =", w)

    # Hankel products on deterministic data, n = 17.
    n = 17
    n1, n2 = pencil(n)
    z = test_vector(n, 0.5, 0.7, 0.1)
    v = test_vector(n2, -0.25, 1.3, 0.4)
    u = test_vector(n1, 0.125, 0.9, -0.3)
    H = hankel(z, n1, n2)
    print("matvec17 =", fmt(H @ v))
    print("matvec_adj17 =", fmt(H.conj().T @ u))
    print("rank_one17 =", fmt(adjoint(np.outer(u, v.conj()))))

    # Two forced modes, n = 16.
    t = np.arange(16)
    x = np.exp((2j * np.pi * 0.1 - 0.2) * t) + 2 * np.exp(2j * np.pi * 0.3 * t)
    print("two_modes16 =", fmt(x))

    # Incoherence of three fixed undamped modes at n = 31.
    n = 31
    n1, n2 = pencil(n)
    f = np.array([0.1, 0.35, 0.8])
    EL = np.exp(2j * np.pi * np.outer(np.arange(n1), f))
    ER = np.exp(2j * np.pi * np.outer(np.arange(n2), f))
    mu = max(n1 / np.linalg.eigvalsh(EL.conj().T @ EL).min(), n2 / np.linalg.eigvalsh(ER.conj().T @ ER).min())
    print(f"mu31 = {mu:.17g}")

    # Tangent projection and best rank-r approximation, n = 20, r = 2.
    n = 20
    n1, n2 = pencil(n)
    h = test_vector(n, 0.3, 0.45, 0.2)
    A = hankel(test_vector(n, -0.2, 1.1, 0.6), n1, n2)
    U = np.linalg.svd(A)[0][:, :2]
    V = np.linalg.svd(A)[2].conj().T[:, :2]
    Z = hankel(h, n1, n2)
    PU, PV = U @ U.conj().T, V @ V.conj().T
    W = PU @ Z + Z @ PV - PU @ Z @ PV
    s = np.linalg.svd(W, compute_uv=False)
    print("tangent_sv20 =", fmt_real(s[:4]))
    print("tail20 =", "%.17g" % np.sqrt((s[2:] ** 2).sum()))

    # Multi-level weights and product, dims (4, 3), pencils (2, 2).
    dims, pen = (4, 3), (2, 2)
    X = test_vector(12, 0.4, 0.6, 0.3).reshape(dims)  # row-major
    rows = [(i1, i2) for i2 in range(pen[1]) for i1 in range(pen[0])]
    cdims = (dims[0] - pen[0] + 1, dims[1] - pen[1] + 1)
    cols = [(j1, j2) for j2 in range(cdims[1]) for j1 in range(cdims[0])]
    Hn = np.array([[X[a[0] + b[0], a[1] + b[1]] for b in cols] for a in rows])
    vn = test_vector(len(cols), 0.2, 0.5, 0.0)
    print("nd_matvec43 =", fmt(Hn @ vn))
    wn = np.zeros(dims)
    for a in rows:
        for b in cols:
            wn[a[0] + b[0], a[1] + b[1]] += 1
    print("nd_weights43 =", fmt_real(wn.ravel()))


if __name__ == "__main__":
    main()
