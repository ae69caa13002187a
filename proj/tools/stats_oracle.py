#!/usr/bin/env python3
"""Generate frozen reference values for the statistical test battery.

Prints a C++ fragment with the reference statistics and p-values used by
tests/test_stats.cpp. Run once and paste the output; the test file records
the generator name so the numbers can be regenerated.
"""
import numpy as np
from scipy import stats

np.set_printoptions(precision=17)


def fmt(x):
    return repr(float(x))


def dunn(groups):
    """Dunn z statistics with tie correction and Bonferroni adjustment."""
    all_vals = np.concatenate(groups)
    n = len(all_vals)
    ranks = stats.rankdata(all_vals)
    # tie correction term for the variance of mean rank differences
    _, counts = np.unique(all_vals, return_counts=True)
    tie_sum = float(np.sum(counts**3 - counts))
    start = 0
    mean_ranks, sizes = [], []
    for g in groups:
        r = ranks[start:start + len(g)]
        mean_ranks.append(float(np.mean(r)))
        sizes.append(len(g))
        start += len(g)
    k = len(groups)
    m = k * (k - 1) // 2
    out = []
    for i in range(k):
        for j in range(i + 1, k):
            var = (n * (n + 1) / 12.0 - tie_sum / (12.0 * (n - 1))) * (
                1.0 / sizes[i] + 1.0 / sizes[j])
            z = abs(mean_ranks[i] - mean_ranks[j]) / np.sqrt(var)
            p = 2.0 * stats.norm.sf(z)
            out.append((i, j, z, min(1.0, p * m)))
    return out


def tukey(groups):
    """Tukey-Kramer q statistics and studentized-range p-values."""
    k = len(groups)
    n_total = sum(len(g) for g in groups)
    df = n_total - k
    msw = sum(np.sum((np.asarray(g) - np.mean(g))**2) for g in groups) / df
    out = []
    for i in range(k):
        for j in range(i + 1, k):
            se = np.sqrt(0.5 * msw * (1.0 / len(groups[i]) + 1.0 / len(groups[j])))
            q = abs(np.mean(groups[i]) - np.mean(groups[j])) / se
            p = stats.studentized_range.sf(q, k, df)
            out.append((i, j, q, p))
    return out


def main():
    rng = np.random.default_rng(20260815)

    sw_cases = {
        "sw3": [2.0, 3.5, 3.1],
        "sw7": [148.0, 154.0, 158.0, 160.0, 161.0, 162.0, 166.0],
        "sw12": list(rng.normal(10.0, 2.0, 12).round(6)),
        "sw25": list(rng.lognormal(0.0, 0.8, 25).round(6)),
        "sw50": list(rng.normal(-3.0, 0.5, 50).round(6)),
    }
    print("// generated by tools/stats_oracle.py (scipy %s)" % __import__("scipy").__version__)
    for name, xs in sw_cases.items():
        w, p = stats.shapiro(xs)
        print(f"const std::vector<double> {name} = {{{', '.join(fmt(v) for v in xs)}}};")
        print(f"const double {name}_w = {fmt(w)}, {name}_p = {fmt(p)};")

    g1 = list(rng.normal(5.0, 1.0, 8).round(6))
    g2 = list(rng.normal(5.5, 1.0, 10).round(6))
    g3 = list(rng.normal(7.0, 1.5, 9).round(6))
    for i, g in enumerate((g1, g2, g3), 1):
        print(f"const std::vector<double> grp{i} = {{{', '.join(fmt(v) for v in g)}}};")
    w, p = stats.levene(g1, g2, g3, center="mean")
    print(f"const double levene_w = {fmt(w)}, levene_p = {fmt(p)};")
    f, p = stats.f_oneway(g1, g2, g3)
    print(f"const double anova_f = {fmt(f)}, anova_p = {fmt(p)};")
    for i, j, q, p in tukey([g1, g2, g3]):
        print(f"const double tukey_q_{i}{j} = {fmt(q)}, tukey_p_{i}{j} = {fmt(p)};")
    h, p = stats.kruskal(g1, g2, g3)
    print(f"const double kw_h = {fmt(h)}, kw_p = {fmt(p)};")
    for i, j, z, p in dunn([g1, g2, g3]):
        print(f"const double dunn_z_{i}{j} = {fmt(z)}, dunn_p_{i}{j} = {fmt(p)};")

    # tied data exercise the tie-corrected rank statistics
    t1 = [1.0, 2.0, 2.0, 3.0, 4.0, 4.0, 4.0]
    t2 = [2.0, 2.0, 3.0, 5.0, 5.0, 6.0]
    t3 = [4.0, 5.0, 6.0, 6.0, 7.0, 8.0, 8.0]
    h, p = stats.kruskal(t1, t2, t3)
    print(f"const double kwt_h = {fmt(h)}, kwt_p = {fmt(p)};")
    for i, j, z, p in dunn([t1, t2, t3]):
        print(f"const double dunnt_z_{i}{j} = {fmt(z)}, dunnt_p_{i}{j} = {fmt(p)};")
    w, p = stats.levene(t1, t2, t3, center="mean")
    print(f"const double levenet_w = {fmt(w)}, levenet_p = {fmt(p)};")

    # studentized range cdf spot checks
    for q, k, nu in [(2.0, 2, 10), (3.5, 3, 27), (4.2, 5, 40), (1.1, 4, 8)]:
        c = stats.studentized_range.cdf(q, k, nu)
        print(f"const double srange_q{str(q).replace('.', 'p')}_k{k}_nu{nu} = {fmt(c)};")


if __name__ == "__main__":
    main()
