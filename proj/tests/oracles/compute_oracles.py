"""Independent reference values for the fixed instances in the unit tests.

Everything here is re-derived from scratch with numpy + cvxpy (Clarabel),
sharing no code with the C++ library. Run it to reprint the constants that
are frozen in tests/test_oracles.cpp.
"""
import itertools

import cvxpy as cp
import numpy as np

K = 3
G1 = np.diag([1.0, 2.0, 3.0]).astype(complex)
G2 = np.array([[0, 1, 0], [1, 0, 1], [0, 1, 0]], dtype=complex)
G3 = np.zeros((3, 3), dtype=complex)
G3[0, 2] = 1j


def herm_basis(gens):
    """Real-orthonormal Hermitian basis of span(gens ∪ gens*)."""
    vecs = []
    for g in gens:
        for h in ((g + g.conj().T) / 2, (g - g.conj().T) / 2j):
            vecs.append(np.concatenate([h.real.ravel(), h.imag.ravel()]))
    u, s, _ = np.linalg.svd(np.array(vecs).T, full_matrices=False)
    u = u[:, s > 1e-10 * s[0]]
    n = K * K
    return [(c[:n] + 1j * c[n:]).reshape(K, K) for c in u.T]


BASIS = herm_basis([G1, G2, G3])


def complement_basis():
    all_h = []
    for p in range(K):
        for q in range(K):
            if p == q:
                m = np.zeros((K, K), complex); m[p, p] = 1; all_h.append(m)
            elif p < q:
                m = np.zeros((K, K), complex); m[p, q] = m[q, p] = 1 / np.sqrt(2); all_h.append(m)
                m = np.zeros((K, K), complex); m[p, q] = 1j / np.sqrt(2); m[q, p] = -1j / np.sqrt(2)
                all_h.append(m)
    b = np.array([np.concatenate([x.real.ravel(), x.imag.ravel()]) for x in BASIS]).T
    a = np.array([np.concatenate([x.real.ravel(), x.imag.ravel()]) for x in all_h]).T
    proj = a - b @ (b.T @ a)
    u, s, _ = np.linalg.svd(proj, full_matrices=False)
    u = u[:, s > 1e-8]
    n = K * K
    return [(c[:n] + 1j * c[n:]).reshape(K, K) for c in u.T]


PERP = complement_basis()


def unit(n, p, q):
    m = np.zeros((n, n), complex); m[p, q] = 1
    return m


def level_basis(n):
    """Hermitian basis of M_n(V)_sa."""
    out = []
    for b in BASIS:
        for p in range(n):
            out.append(np.kron(unit(n, p, p), b))
            for q in range(p + 1, n):
                out.append(np.kron(unit(n, p, q) + unit(n, q, p), b) / np.sqrt(2))
                out.append(np.kron(1j * (unit(n, p, q) - unit(n, q, p)), b) / np.sqrt(2))
    return out


def blocks(grid):
    return np.block(grid)


X1 = (1 + 1j) * G3 + 0.5 * G2 - 0.25 * G1
X2 = blocks([[G2, 2 * G3], [G3.conj().T, -G1 + 1j * G2]])
F1 = [[G1 + 1j * G2 + 2 * G3]]
F2 = [[G2, G3], [1j * G1, G3.conj().T - G2]]

SOLVE = dict(solver="CLARABEL")


def herm_var(basis):
    c = cp.Variable(len(basis))
    return c, sum(c[i] * basis[i] for i in range(len(basis)))


def reg_norm(x):
    n = x.shape[0] // K
    lb = level_basis(n)
    _, a = herm_var(lb)
    _, d = herm_var(lb)
    t = cp.Variable()
    eye = np.eye(n * K)
    cons = [cp.bmat([[a, x], [x.conj().T, d]]) >> 0, t * eye - a >> 0, t * eye - d >> 0]
    prob = cp.Problem(cp.Minimize(t), cons)
    prob.solve(**SOLVE)
    return prob.value


def nu(x):
    n = x.shape[0] // K
    m = 2 * n * K
    h = blocks([[np.zeros_like(x), x], [x.conj().T, np.zeros_like(x)]])
    lb = level_basis(2 * n)
    best = 0.0
    for sign in (1.0, -1.0):
        t2 = cp.Variable((m, m), hermitian=True)
        t1 = cp.Variable((m, m), complex=True)
        cons = [t2 >> 0, cp.normNuc(t1) <= 1]
        # Same functional on M_2n(V): T2 − T1 annihilates every basis element.
        for b in lb:
            cons.append(cp.trace(b @ (t2 - t1)) == 0)
        prob = cp.Problem(cp.Maximize(sign * cp.real(cp.trace(t2 @ h))), cons)
        prob.solve(**SOLVE)
        best = max(best, prob.value)
    return best


def dual_cb_norm(reps):
    """min over extensions of the diamond norm of the adjoint map (Watrous' dual SDP)."""
    n = len(reps)
    ext = {}
    j = 0
    for a, b in itertools.product(range(n), repeat=2):
        w = 0
        for e in PERP:
            cr = cp.Variable(); ci = cp.Variable()
            w = w + (cr + 1j * ci) * e
        ext[a, b] = reps[a][b] + w
    # Choi of Ψ(E_ab) = R_ab in M_k ⊗ M_n (k outer).
    jm = sum(cp.kron(ext[a, b], unit(n, a, b)) for a, b in ext)
    dim = K * n
    y0 = cp.Variable((dim, dim), hermitian=True)
    y1 = cp.Variable((dim, dim), hermitian=True)
    s0 = cp.Variable(); s1 = cp.Variable()
    cons = [cp.bmat([[y0, -jm], [-jm.H, y1]]) >> 0,
            s0 * np.eye(n) - cp.partial_trace(y0, [K, n], axis=0) >> 0,
            s1 * np.eye(n) - cp.partial_trace(y1, [K, n], axis=0) >> 0]
    prob = cp.Problem(cp.Minimize((s0 + s1) / 2), cons)
    prob.solve(**SOLVE)
    return prob.value


def nu_dual(reps):
    """ν of F in the dual, over w ∈ M_2n(V)^+ with w ⪯ P ⊗ I_k, P ⪰ 0, Tr P ≤ 1."""
    n = len(reps)
    m = 2 * n
    g = [[np.zeros((K, K), complex)] * m for _ in range(m)]
    for i in range(n):
        for j in range(n):
            g[i][n + j] = reps[i][j]
            g[n + j][i] = reps[i][j].conj().T
    lb = level_basis(m)
    best = 0.0
    for sign in (1.0, -1.0):
        _, w = herm_var(lb)
        pm = cp.Variable((m, m), hermitian=True)
        cons = [w >> 0, cp.kron(pm, np.eye(K)) - w >> 0, cp.real(cp.trace(pm)) <= 1]
        pairing = sum(cp.trace(g[i][j].conj().T @ w[i * K:(i + 1) * K, j * K:(j + 1) * K])
                      for i in range(m) for j in range(m))
        prob = cp.Problem(cp.Maximize(sign * cp.real(pairing)), cons)
        prob.solve(**SOLVE)
        best = max(best, prob.value)
    return best


if __name__ == "__main__":
    print("dim V =", len(BASIS), " dim Vperp =", len(PERP))
    print("reg x1 =", repr(reg_norm(X1)), " norm =", np.linalg.norm(X1, 2))
    print("reg x2 =", repr(reg_norm(X2)), " norm =", np.linalg.norm(X2, 2))
    print("nu x1 =", repr(nu(X1)))
    print("nu x2 =", repr(nu(X2)))
    print("cb f1 =", repr(dual_cb_norm(F1)))
    print("cb f2 =", repr(dual_cb_norm(F2)))
    print("nu_dual f1 =", repr(nu_dual(F1)))
    print("nu_dual f2 =", repr(nu_dual(F2)))
