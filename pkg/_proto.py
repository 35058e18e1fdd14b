"""Throwaway prototype: validate model math + calibrate defaults. Deleted before delivery."""
import math
import numpy as np

SQRT3 = math.sqrt(3.0)
EULER = 0.5772156649015329


def expi_series(x):
    s = 0.0; term = 1.0; n = 1
    while n < 400:
        term *= x / n
        incr = term / n
        s += incr
        if abs(incr) <= 1e-17 * abs(s):
            break
        n += 1
    return EULER + math.log(-x) + s


def e1_scaled_cf(t):
    tiny = 1e-300
    b = t + 1.0; c = 1.0 / tiny; d = 1.0 / b; h = d
    for n in range(1, 500):
        a = -float(n * n); b += 2.0
        d = 1.0 / (a * d + b); c = b + a / c
        delta = c * d; h *= delta
        if abs(delta - 1.0) < 1e-16:
            return h
    raise RuntimeError


def expi_scaled(y):
    """exp(y)*Ei(-y), y>0."""
    if y < 4.0:
        return math.exp(y) * expi_series(-y)
    return -e1_scaled_cf(y)


# --- geometry -------------------------------------------------------------
def grid(n, R=1.0):
    cols = 6
    xy = np.empty((n, 2))
    for i in range(n):
        r, c = divmod(i, cols)
        xy[i] = (2.0 * R * c + R * (r % 2), SQRT3 * R * r)
    return xy


def topo(n, seed, R=1.0, h=0.01, ccu=(0.1, 0.5), ceu=(0.8, 1.0)):
    bs = grid(n, R)
    ccu_xy = np.empty((n, 2)); ceu_xy = np.empty((n, 2))
    for i in range(n):
        rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(i,)))
        u = rng.random(4)
        r1 = R * math.sqrt(ccu[0]**2 + u[0] * (ccu[1]**2 - ccu[0]**2))
        t1 = 2 * math.pi * u[1]
        r2 = R * math.sqrt(ceu[0]**2 + u[2] * (ceu[1]**2 - ceu[0]**2))
        t2 = 2 * math.pi * u[3]
        ccu_xy[i] = bs[i] + r1 * np.array([math.cos(t1), math.sin(t1)])
        ceu_xy[i] = bs[i] + r2 * np.array([math.cos(t2), math.sin(t2)])
    def dmat(users):
        g = np.linalg.norm(bs[:, None, :] - users[None, :, :], axis=2)
        return np.hypot(g, h)
    return dmat(ccu_xy), dmat(ceu_xy)


def tables(d, v, se, cap=0.5):
    pl = d ** (-v)
    eps = np.minimum(se, cap * pl) if cap is not None else np.full_like(pl, se)
    return pl - eps, eps


# --- exact ----------------------------------------------------------------
def weights(k):
    n = len(k)
    w = np.ones(n)
    for i in range(n):
        for h in range(n):
            if h != i:
                w[i] *= k[h] / (k[h] - k[i])
    return w


def logexp(k, a, mask=None):
    w = weights(k)
    idx = range(len(k)) if mask is None else [i for i in range(len(k)) if mask[i]]
    s = 0.0
    for i in idx:
        s += w[i] * (math.log(a) - expi_scaled(a * k[i]))
    return s / math.log(2)


def esc_exact(sh_ccu, sh_ceu, eps_ccu, eps_ceu, M, alpha, rho, gam, TX=2, mode="full"):
    N = sh_ccu.shape[0]
    beta = 1 - alpha
    ccu = []
    for j in range(M):
        a = rho * eps_ccu[:, j].sum() + rho * gam + 1.0
        kx = np.array([1.0 / (alpha * rho * sh_ccu[i, j]) if i < M else 1.0 / (rho * sh_ccu[i, j]) for i in range(N)])
        mx = None if mode == "full" else [i < M for i in range(N)]
        ky = np.delete(kx, j)
        labels_y = [i for i in range(N) if i != j]
        my = None if mode == "full" else [lab < M for lab in labels_y]
        ccu.append(logexp(kx, a, mx) - logexp(ky, a, my))
    b = rho * eps_ceu[:, 0].sum() + 1.0
    kx = np.array([1.0 / (rho * sh_ceu[i, 0]) for i in range(N)])
    ky = np.array([1.0 / (alpha * rho * sh_ceu[i, 0]) if i < M else 1.0 / (rho * sh_ceu[i, 0]) for i in range(N)])
    mk = None if mode == "full" else [i < M for i in range(N)]
    comp = logexp(kx, b, mk) - logexp(ky, b, mk)

    def pb(m):
        return 0.5 * (1.0 - math.sqrt(m / (2.0 + m)))
    pe2 = 0.5 * (pb(rho * sh_ceu[0, 1]) + pb(rho * sh_ceu[1, 1]))
    sm = [(1 - pe2) * math.floor(math.log2(2 * TX))]
    pes = [pe2]
    for k0 in range(2, M):
        pe = pb(rho * sh_ceu[k0, k0])
        pes.append(pe)
        sm.append((1 - pe) * math.floor(math.log2(TX)))
    return np.array(ccu), comp, np.array(sm), pes


# --- sim ------------------------------------------------------------------
def qf(x):
    from scipy.special import erfc
    return 0.5 * erfc(x / math.sqrt(2))


def sim_rates(sh_ccu, sh_ceu, eps_ccu, eps_ceu, M, alpha, rho, gam, trials, seed, TX=2, scheme="prop"):
    N = sh_ccu.shape[0]
    beta = 1 - alpha
    rng = np.random.Generator(np.random.Philox(key=np.array([seed, 0], dtype=np.uint64)))
    out_ccu = np.zeros(M); out_ceu = np.zeros(M)
    B = 65536
    done = 0
    esum_c = eps_ccu.sum(axis=0); esum_e = eps_ceu.sum(axis=0)
    while done < trials:
        nb = min(B, trials - done)
        g_c = rng.exponential(1.0, size=(nb, N, N)) * sh_ccu
        g_e = rng.exponential(1.0, size=(nb, N, N)) * sh_ceu
        if scheme == "prop":
            for j in range(M):
                num = alpha * rho * g_c[:, j, j]
                den = (alpha * rho * (g_c[:, :M, j].sum(axis=1) - g_c[:, j, j])
                       + rho * g_c[:, M:, j].sum(axis=1)
                       + rho * esum_c[j] + rho * gam + 1.0)
                out_ccu[j] += np.log2(1 + num / den).sum()
            s = g_e[:, :M, 0].sum(axis=1)
            num = beta * rho * s
            den = alpha * rho * s + rho * g_e[:, M:, 0].sum(axis=1) + rho * esum_e[0] + 1.0
            out_ceu[0] += np.log2(1 + num / den).sum()
            pe2 = 0.5 * (qf(np.sqrt(rho * g_e[:, 0, 1])) + qf(np.sqrt(rho * g_e[:, 1, 1])))
            out_ceu[1] += ((1 - pe2) * math.floor(math.log2(2 * TX))).sum()
            for k0 in range(2, M):
                pe = qf(np.sqrt(rho * g_e[:, k0, k0]))
                out_ceu[k0] += ((1 - pe) * math.floor(math.log2(TX))).sum()
        else:
            for j in range(M):
                num = alpha * rho * g_c[:, j, j]
                den = rho * (g_c[:, :, j].sum(axis=1) - g_c[:, j, j]) + rho * esum_c[j] + rho * gam + 1.0
                out_ccu[j] += np.log2(1 + num / den).sum()
            for k0 in range(M):
                num = beta * rho * g_e[:, k0, k0]
                den = (alpha * rho * g_e[:, k0, k0]
                       + rho * (g_e[:, :, k0].sum(axis=1) - g_e[:, k0, k0])
                       + rho * esum_e[k0] + 1.0)
                out_ceu[k0] += np.log2(1 + num / den).sum()
        done += nb
    return out_ccu / trials, out_ceu / trials


def run(v, rho_db=20.0, n=12, M=3, se=0.01, gam=10**-2.5, seeds=range(100), trials=4000):
    rho = 10 ** (rho_db / 10)
    acc = {"ceu_gain": [], "esc_gain": [], "pe": [], "cosm_gap": []}
    for sd in seeds:
        d_c, d_e = topo(n, sd)
        sh_c, ep_c = tables(d_c, v, se)
        sh_e, ep_e = tables(d_e, v, se)
        pc, pe_ = sim_rates(sh_c, sh_e, ep_c, ep_e, M, 0.1, rho, gam, trials, 1000 + sd, scheme="prop")
        bc, be = sim_rates(sh_c, sh_e, ep_c, ep_e, M, 0.1, rho, gam, trials, 1000 + sd, scheme="base")
        acc["ceu_gain"].append((pe_[0] - be[0]) / be[0])
        esc_p = pc.sum() + pe_.sum(); esc_b = bc.sum() + be.sum()
        acc["esc_gain"].append((esc_p - esc_b) / esc_b)
        ccu_e, comp_e, sm_e, pes = esc_exact(sh_c, sh_e, ep_c, ep_e, M, 0.1, rho, gam)
        acc["pe"].append(max(pes))
        acc["cosm_gap"].append(sm_e[0] - sm_e[1])
    print(f"v={v}: CEU gain mean {100*np.mean(acc['ceu_gain']):.1f}%  ESC gain mean {100*np.mean(acc['esc_gain']):.1f}%")
    print(f"      max Pe over topologies {max(acc['pe']):.4f}; CoSM-nonCoSM gap mean {np.mean(acc['cosm_gap']):.3f} range [{min(acc['cosm_gap']):.3f},{max(acc['cosm_gap']):.3f}]")


def degradation(v, rho_db=20.0, n=12, M=3, seed=7):
    rho = 10 ** (rho_db / 10)
    d_c, d_e = topo(n, seed)
    def esc(se, gam):
        sh_c, ep_c = tables(d_c, v, se)
        sh_e, ep_e = tables(d_e, v, se)
        ccu, comp, sm, _ = esc_exact(sh_c, sh_e, ep_c, ep_e, M, 0.1, rho, gam)
        return ccu.sum() + comp + sm.sum()
    ref = esc(0.0, 0.0)
    for gam_db in (-15.0, -25.0):
        e = esc(0.0, 10 ** (gam_db / 10))
        print(f"v={v} gam={gam_db}dB: degradation {100*(1 - e/ref):.3f}%")
    for se in (0.01, 0.02):
        e = esc(se, 0.0)
        print(f"v={v} sigma_eps={se}: degradation {100*(1 - e/ref):.3f}%")


def sim_vs_exact(v, rho_db, n=12, M=3, se=0.01, gam=10**-2.5, seed=7, trials=300000):
    rho = 10 ** (rho_db / 10)
    d_c, d_e = topo(n, seed)
    sh_c, ep_c = tables(d_c, v, se)
    sh_e, ep_e = tables(d_e, v, se)
    pc, pe_ = sim_rates(sh_c, sh_e, ep_c, ep_e, M, 0.1, rho, gam, trials, 99, scheme="prop")
    ccu_e, comp_e, sm_e, _ = esc_exact(sh_c, sh_e, ep_c, ep_e, M, 0.1, rho, gam)
    esc_s = pc.sum() + pe_.sum()
    esc_x = ccu_e.sum() + comp_e + sm_e.sum()
    print(f"v={v} rho={rho_db}dB: sim ESC {esc_s:.4f} exact ESC {esc_x:.4f} rel gap {abs(esc_s-esc_x)/esc_x*100:.3f}%")
    ccu_lit, comp_lit, sm_lit, _ = esc_exact(sh_c, sh_e, ep_c, ep_e, M, 0.1, rho, gam, mode="lit")
    esc_l = ccu_lit.sum() + comp_lit + sm_lit.sum()
    print(f"      paper-literal ESC {esc_l:.4f} (gap to full {abs(esc_l-esc_x)/esc_x*100:.2f}%)")


def ceu_vs_n(v, rho_db=20.0, M=3, se=0.01, gam=10**-2.5, seed=7, trials=60000):
    rho = 10 ** (rho_db / 10)
    res_p = []; res_b = []
    for n in (3, 12):
        d_c, d_e = topo(n, seed)
        sh_c, ep_c = tables(d_c, v, se)
        sh_e, ep_e = tables(d_e, v, se)
        ccu_e, comp_e, sm_e, _ = esc_exact(sh_c, sh_e, ep_c, ep_e, M, 0.1, rho, gam)
        bc, be = sim_rates(sh_c, sh_e, ep_c, ep_e, M, 0.1, rho, gam, trials, 5, scheme="base")
        res_p.append(comp_e + sm_e.sum()); res_b.append(be.sum())
    print(f"v={v}: proposed total-CEU decline {100*(1-res_p[1]/res_p[0]):.2f}%  baseline {100*(1-res_b[1]/res_b[0]):.2f}%")


if __name__ == "__main__":
    import sys
    which = sys.argv[1] if len(sys.argv) > 1 else "all"
    if which in ("all", "cal"):
        for v in (2.0, 3.0, 4.0):
            run(v, seeds=range(60), trials=3000)
            degradation(v)
            ceu_vs_n(v)
            print()
    if which in ("all", "sve"):
        for rho_db in (10.0, 20.0, 30.0):
            sim_vs_exact(2.0, rho_db)
