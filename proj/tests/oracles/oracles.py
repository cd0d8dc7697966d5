"""Reference values for the unit tests.

Standalone numpy re-derivations of the estimators. Run it and paste the
printed literals into the C++ tests; the tests never call this script.
"""
import numpy as np

np.set_printoptions(precision=17)
C = 299792458.0


def lit(v):
    return "{" + ", ".join(repr(float(x)) for x in np.ravel(v)) + "}"


# Default layout (positions only; heights vary so z is observable).
P = np.array([(0, 0, 6.2), (10, -1, 7.6), (20, 0, 6.6), (20, 10, 7.4), (10, 11, 6.0), (0, 10, 7.8)], float)


def andrews(e, emax):
    if e >= emax:
        return 0.0
    if e == 0:
        return 1.0
    a = e * np.pi / emax
    return np.sin(a) / a


def system(Pk, d, w, r):
    A, b, ww = [], [], []
    for k in range(len(Pk)):
        if k == r:
            continue
        dp = Pk[k] - Pk[r]
        dd = d[k] - d[r]
        A.append([*dp, dd])
        b.append(0.5 * (dp @ dp - dd * dd))
        ww.append(w[k])
    return np.array(A), np.array(b), np.array(ww)


def wls(Pk, d, w, r):
    A, b, ww = system(Pk, d, w, r)
    W = np.diag(ww)
    th = np.linalg.solve(A.T @ W @ A, A.T @ W @ b)
    return Pk[r] + th[:3]


def residuals(Pk, d, x):
    K = len(Pk)
    dist = np.linalg.norm(x - Pk, axis=1)
    return np.array([np.mean([abs((d[k] - d[r]) - (dist[k] - dist[r])) for k in range(K) if k != r])
                     for r in range(K)])


def irls_tdoa(Pk, d, nit=10, emax=2.5, eps=1e-5):
    K = len(Pk)
    w = np.full(K, 1.0 / K)
    X = np.array([wls(Pk, d, w, r) for r in range(K)])
    x = (w / w.sum()) @ X
    it, delta = 0, np.inf
    while it < nit and delta > eps:
        it += 1
        e = residuals(Pk, d, x)
        w = np.array([andrews(v, emax) for v in e])
        prev = x
        x = (w / w.sum()) @ X
        X = np.array([wls(Pk, d, w, r) for r in range(K)])
        delta = np.linalg.norm(x - prev)
    return x, w, it


def bearing_ls(anchors, dirs, w):
    N = np.zeros((3, 3))
    rhs = np.zeros(3)
    for a, u, wk in zip(anchors, dirs, w):
        M = np.eye(3) - np.outer(u, u)
        N += wk * M
        rhs += wk * M @ a
    return np.linalg.solve(N, rhs)


def irls_aoa(anchors, dirs, nit=10, emax=0.2, eps=1e-5):
    K = len(anchors)
    w = np.full(K, 1.0 / K)
    x = bearing_ls(anchors, dirs, w)
    it, delta = 0, np.inf
    while it < nit and delta > eps:
        it += 1
        res = []
        for a, u in zip(anchors, dirs):
            v = x - a
            res.append(np.arccos(np.clip(u @ v / np.linalg.norm(v), -1, 1)))
        wr = np.array([andrews(e, emax) for e in res])
        nxt = bearing_ls(anchors, dirs, wr / wr.sum())
        delta = np.linalg.norm(nxt - x)
        x = nxt
    return x, wr, it


print("== build_system, 5 hand-built locators, r = 2 (0-based)")
P5 = np.array([(0, 0, 3), (8, 0, 5), (8, 6, 3.5), (0, 6, 4.5), (4, 3, 6)], float)
x5 = np.array([3.0, 2.0, 1.0])
d5 = np.linalg.norm(P5 - x5, axis=1) + 5.0 + np.array([0.1, -0.2, 0.05, 0.3, -0.15])
A, b, _ = system(P5, d5, np.ones(5), 2)
print("ranges", lit(d5))
print("A", lit(A))
print("b", lit(b))
w5 = np.array([1.0, 0.5, 0.8, 0.3, 1.0])
print("wls r=0 weights", lit(w5), "->", lit(wls(P5, d5, w5, 0)))

print("== irls_tdoa on the default layout")
xt = np.array([7.0, 4.0, 1.5])
noise = np.array([0.12, -0.3, 0.05, 0.21, -0.08, 0.17])
d = np.linalg.norm(P - xt, axis=1) + 120.0 + noise
x, w, it = irls_tdoa(P, d)
print("ranges", lit(d))
print("x", lit(x), "w", lit(w), "it", it)
d2 = d.copy()
d2[3] += 3.0
x, w, it = irls_tdoa(P, d2)
print("ranges(+3 m on locator 4)", lit(d2))
print("x", lit(x), "w", lit(w), "it", it)

print("== residual_errors at a fixed point")
print(lit(residuals(P, d2, np.array([8.0, 3.0, 2.0]))))

print("== likelihoods (identity orientations)")
xq = np.array([6.0, 3.5, 2.0])
wq = np.array([1.0, 0.7, 0.4, 0.9, 0.2, 0.6])
dq = d2
off = 118.7  # c * tau in meters
rho = np.linalg.norm(xq - P, axis=1)
r = dq - rho - off
print("toa value", repr(-0.5 * np.sum(wq * r * r)))
u = (xq - P) / rho[:, None]
grad = np.sum((wq * r)[:, None] * u, axis=0)
H = np.zeros((3, 3))
for k in range(6):
    uu = np.outer(u[k], u[k])
    H += wq[k] * (-uu + r[k] * (np.eye(3) - uu) / rho[k])
print("toa grad", lit(grad))
print("toa hess", lit(H))
off_star = np.sum(wq * (dq - rho)) / np.sum(wq)
print("profiled offset (m)", repr(off_star), "tau (s)", repr(off_star / C))
h = -np.sum(wq[:, None] * u, axis=0)
Hp = H - np.outer(h, h) / (-np.sum(wq))
print("profiled hess at given offset", lit(Hp))

g = np.array([[0.6, 0.3, -0.74], [-0.2, 0.5, -0.84], [-0.7, 0.3, -0.65],
              [-0.6, -0.4, -0.69], [-0.1, -0.7, -0.7], [0.5, -0.5, -0.7]])
g = g / np.linalg.norm(g, axis=1)[:, None]
kq = np.array([10.0, 8.0, 6.0, 9.0, 3.0, 7.0])
print("aoa dirs", lit(g))
a = np.sum(g * (xq - P), axis=1)
print("aoa value", repr(np.sum(kq * a / rho)))
v = xq - P
ga = np.sum(kq[:, None] * (g / rho[:, None] - a[:, None] * v / rho[:, None] ** 3), axis=0)
Ha = np.zeros((3, 3))
for k in range(6):
    Ha += kq[k] * (-(np.outer(g[k], v[k]) + np.outer(v[k], g[k])) / rho[k] ** 3
                   - a[k] * np.eye(3) / rho[k] ** 3 + 3 * a[k] * np.outer(v[k], v[k]) / rho[k] ** 5)
print("aoa grad", lit(ga))
print("aoa hess", lit(Ha))
Hj = Hp + Ha
print("variance proxy of the joint profiled hessian", repr(np.mean(np.diag(np.linalg.inv(-Hj)))))

print("== skew lines")
a1, u1 = np.array([1.0, -2.0, 0.5]), np.array([1.0, 2.0, 0.0])
a2, u2 = np.array([0.0, 3.0, 4.0]), np.array([0.0, 1.0, -3.0])
u1 /= np.linalg.norm(u1)
u2 /= np.linalg.norm(u2)
# closest points by the 2x2 normal equations
M = np.array([[u1 @ u1, -u1 @ u2], [u1 @ u2, -u2 @ u2]])
rhs = np.array([(a2 - a1) @ u1, (a2 - a1) @ u2])
s, t = np.linalg.solve(M, rhs)
print("midpoint", lit(0.5 * ((a1 + s * u1) + (a2 + t * u2))))

print("== irls_aoa on the default layout, identity orientations")
xa = np.array([12.0, 6.0, 1.5])
dirs = []
rots = [0.03, -0.05, 0.02, 0.04, -0.02, 0.7]  # last bearing grossly wrong
for k in range(6):
    v = xa - P[k]
    v /= np.linalg.norm(v)
    perp = np.cross(v, [0.0, 0.0, 1.0])
    perp /= np.linalg.norm(perp)
    th = rots[k]
    dirs.append(np.cos(th) * v + np.sin(th) * perp)
dirs = np.array(dirs)
x, w, it = irls_aoa(P, dirs)
print("dirs", lit(dirs))
print("x", lit(x), "w", lit(w), "it", it)

print("== variance proxy of a fixed negative-definite matrix")
Hn = -np.array([[2.0, 0.5, 0.0], [0.5, 1.0, 0.2], [0.0, 0.2, 4.0]])
print(repr(np.mean(np.diag(np.linalg.inv(-Hn)))))

print("== percentiles of 0.1 .. 1.0, linear between order statistics at (n-1)q")
e = np.arange(1, 11) / 10
print("median", repr(np.percentile(e, 50)), "p95", repr(np.percentile(e, 95)), "p99", repr(np.percentile(e, 99)))
