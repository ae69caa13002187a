// Normality, homogeneity, omnibus and post-hoc test implementations.
#include "spheroid/stats.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/fisher_f.hpp>
#include <boost/math/distributions/normal.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "spheroid/error.hpp"

namespace spheroid {

namespace {

const boost::math::normal_distribution<double> kStdNormal(0.0, 1.0);

double normal_cdf(double z) { return boost::math::cdf(kStdNormal, z); }
double normal_quantile(double p) { return boost::math::quantile(kStdNormal, p); }
double normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi); }

double f_sf(double x, double d1, double d2) {
    if (!(x > 0.0)) return 1.0;
    boost::math::fisher_f_distribution<double> dist(d1, d2);
    return boost::math::cdf(boost::math::complement(dist, x));
}

double chi2_sf(double x, double df) {
    if (!(x > 0.0)) return 1.0;
    boost::math::chi_squared_distribution<double> dist(df);
    return boost::math::cdf(boost::math::complement(dist, x));
}

// gauss-legendre nodes/weights on [-1, 1], 10 point rule
constexpr int kGlN = 10;
constexpr double kGlX[kGlN] = {-0.9739065285171717, -0.8650633666889845, -0.6794095682990244,
                               -0.4333953941292472, -0.1488743389816312, 0.1488743389816312,
                               0.4333953941292472,  0.6794095682990244,  0.8650633666889845,
                               0.9739065285171717};
constexpr double kGlW[kGlN] = {0.0666713443086881, 0.1494513491505806, 0.2190863625159820,
                               0.2692667193099963, 0.2955242247147529, 0.2955242247147529,
                               0.2692667193099963, 0.2190863625159820, 0.1494513491505806,
                               0.0666713443086881};

template <typename F>
double integrate(F&& f, double a, double b, int panels) {
    double total = 0.0;
    double width = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
        double lo = a + p * width;
        double mid = lo + 0.5 * width;
        double half = 0.5 * width;
        for (int i = 0; i < kGlN; ++i) total += kGlW[i] * f(mid + half * kGlX[i]) * half;
    }
    return total;
}

// cdf of the range of k standard normals
double range_cdf(double w, double k) {
    if (w <= 0.0) return 0.0;
    if (w >= 14.0) return 1.0;  // missing mass is under k * 1e-11
    auto integrand = [&](double z) {
        double span = normal_cdf(z) - normal_cdf(z - w);
        if (span <= 0.0) return 0.0;
        return normal_pdf(z) * std::pow(span, k - 1.0);
    };
    // the normal density factor kills the integrand outside this window
    return std::min(1.0, k * integrate(integrand, -6.6, 6.6, 16));
}

double mean_of(const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

// midranks over the pooled samples plus the tie-size tally
std::vector<std::vector<double>> midranks(const std::vector<std::vector<double>>& groups,
                                          std::vector<std::size_t>* tie_sizes) {
    struct Tagged {
        double v;
        std::size_t g;
        std::size_t idx;
    };
    std::vector<Tagged> pooled;
    for (std::size_t g = 0; g < groups.size(); ++g)
        for (std::size_t i = 0; i < groups[g].size(); ++i) pooled.push_back({groups[g][i], g, i});
    std::sort(pooled.begin(), pooled.end(), [](const Tagged& a, const Tagged& b) { return a.v < b.v; });

    std::vector<std::vector<double>> ranks(groups.size());
    for (std::size_t g = 0; g < groups.size(); ++g) ranks[g].resize(groups[g].size());
    std::size_t i = 0;
    while (i < pooled.size()) {
        std::size_t j = i;
        while (j < pooled.size() && pooled[j].v == pooled[i].v) ++j;
        double r = 0.5 * static_cast<double>(i + 1 + j);  // average of ranks i+1..j
        if (tie_sizes && j - i > 1) tie_sizes->push_back(j - i);
        for (std::size_t t = i; t < j; ++t) ranks[pooled[t].g][pooled[t].idx] = r;
        i = j;
    }
    return ranks;
}

}  // namespace

double studentized_range_cdf(double q, double k, double nu) {
    if (q <= 0.0) return 0.0;
    if (nu > 1e6) return range_cdf(q, k);
    double log_c = 0.5 * nu * std::log(0.5 * nu) + std::log(2.0) - std::lgamma(0.5 * nu);
    double mode = std::sqrt(std::max(nu - 1.0, 0.5) / nu);
    double log_peak = log_c + (nu - 1.0) * std::log(mode) - 0.5 * nu * mode * mode;
    auto outer = [&](double s) {
        double log_g = log_c + (nu - 1.0) * std::log(s) - 0.5 * nu * s * s;
        if (log_g < log_peak - 45.0) return 0.0;
        return std::exp(log_g) * range_cdf(q * s, k);
    };
    // the chi scaling density concentrates around its mode with width ~ 1/sqrt(2 nu)
    double sigma = 1.0 / std::sqrt(2.0 * nu);
    double lo = std::max(0.0, mode - 9.0 * sigma);
    double hi = mode + 9.0 * sigma;
    int panels = std::max(12, static_cast<int>(std::ceil((hi - lo) / sigma)));
    return std::min(1.0, integrate(outer, lo, hi, panels));
}

void GroupedSamples::validate() const {
    if (groups.size() < 2) throw InputError("need at least two groups to compare");
    if (!names.empty() && names.size() != groups.size())
        throw InputError("group names and samples disagree in count");
    for (const auto& g : groups)
        if (g.empty()) throw InputError("empty group");
}

std::pair<double, double> shapiro_wilk(std::vector<double> sample) {
    const std::size_t n = sample.size();
    if (n < 3 || n > 50)
        throw InputError("normality test supports sample sizes 3 through 50, got " +
                         std::to_string(n));
    std::sort(sample.begin(), sample.end());
    if (sample.front() == sample.back())
        throw InputError("normality test undefined for a constant sample");

    // expected normal order statistics (Blom approximation)
    std::vector<double> m(n);
    double m_ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        m[i] = normal_quantile((static_cast<double>(i + 1) - 0.375) /
                               (static_cast<double>(n) + 0.25));
        m_ss += m[i] * m[i];
    }

    std::vector<double> a(n);
    const double u = 1.0 / std::sqrt(static_cast<double>(n));
    if (n == 3) {
        a[0] = -std::sqrt(0.5);
        a[2] = std::sqrt(0.5);
        a[1] = 0.0;
    } else {
        double rsqrt_ss = 1.0 / std::sqrt(m_ss);
        double an = m[n - 1] * rsqrt_ss + u * (0.221157 +
                    u * (-0.147981 + u * (-2.071190 + u * (4.434685 + u * -2.706056))));
        if (n > 5) {
            double an1 = m[n - 2] * rsqrt_ss + u * (0.042981 +
                         u * (-0.293762 + u * (-1.752461 + u * (5.682633 + u * -3.582633))));
            double phi = (m_ss - 2.0 * m[n - 1] * m[n - 1] - 2.0 * m[n - 2] * m[n - 2]) /
                         (1.0 - 2.0 * an * an - 2.0 * an1 * an1);
            a[n - 1] = an;
            a[n - 2] = an1;
            a[0] = -an;
            a[1] = -an1;
            double s = 1.0 / std::sqrt(phi);
            for (std::size_t i = 2; i + 2 < n; ++i) a[i] = m[i] * s;
        } else {
            double phi = (m_ss - 2.0 * m[n - 1] * m[n - 1]) / (1.0 - 2.0 * an * an);
            a[n - 1] = an;
            a[0] = -an;
            double s = 1.0 / std::sqrt(phi);
            for (std::size_t i = 1; i + 1 < n; ++i) a[i] = m[i] * s;
        }
    }

    double xbar = mean_of(sample);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        num += a[i] * sample[i];
        den += (sample[i] - xbar) * (sample[i] - xbar);
    }
    double w = num * num / den;
    if (w > 1.0) w = 1.0;

    double p;
    if (n == 3) {
        constexpr double kPi6 = 1.90985931710274;    // 6/pi
        constexpr double kStqr = 1.04719755119660;   // asin(sqrt(3/4))
        p = kPi6 * (std::asin(std::sqrt(w)) - kStqr);
        p = std::clamp(p, 0.0, 1.0);
    } else if (n <= 11) {
        double nn = static_cast<double>(n);
        double gamma = -2.273 + 0.459 * nn;
        double mu = 0.5440 + nn * (-0.39978 + nn * (0.025054 + nn * -6.714e-4));
        double sigma = std::exp(1.3822 + nn * (-0.77857 + nn * (0.062767 + nn * -0.0020322)));
        double arg = gamma - std::log(1.0 - w);
        if (arg <= 0.0) return {w, 0.0};
        double z = (-std::log(arg) - mu) / sigma;
        p = 1.0 - normal_cdf(z);
    } else {
        double ln_n = std::log(static_cast<double>(n));
        double mu = -1.5861 + ln_n * (-0.31082 + ln_n * (-0.083751 + ln_n * 0.0038915));
        double sigma = std::exp(-0.4803 + ln_n * (-0.082676 + ln_n * 0.0030302));
        double z = (std::log(1.0 - w) - mu) / sigma;
        p = 1.0 - normal_cdf(z);
    }
    return {w, p};
}

std::pair<double, double> levene(const std::vector<std::vector<double>>& groups) {
    if (groups.size() < 2) throw InputError("homogeneity test needs at least two groups");
    std::size_t total = 0;
    for (const auto& g : groups) {
        if (g.size() < 2) throw InputError("homogeneity test needs at least two values per group");
        total += g.size();
    }
    bool all_same = true;
    for (const auto& g : groups)
        for (double v : g)
            if (v != groups[0][0]) all_same = false;
    if (all_same) throw InputError("homogeneity test undefined when all values are identical");

    const std::size_t k = groups.size();
    std::vector<std::vector<double>> z(k);
    std::vector<double> zbar(k);
    double zgrand = 0.0;
    for (std::size_t g = 0; g < k; ++g) {
        double mu = mean_of(groups[g]);
        z[g].reserve(groups[g].size());
        for (double v : groups[g]) z[g].push_back(std::fabs(v - mu));
        zbar[g] = mean_of(z[g]);
        zgrand += zbar[g] * static_cast<double>(groups[g].size());
    }
    zgrand /= static_cast<double>(total);

    double between = 0.0, within = 0.0;
    for (std::size_t g = 0; g < k; ++g) {
        between += static_cast<double>(groups[g].size()) * (zbar[g] - zgrand) * (zbar[g] - zgrand);
        for (double v : z[g]) within += (v - zbar[g]) * (v - zbar[g]);
    }
    double d1 = static_cast<double>(k - 1);
    double d2 = static_cast<double>(total - k);
    if (within == 0.0) {
        // equal spreads in every group, statistic degenerates to zero
        if (between == 0.0) return {0.0, 1.0};
        throw InputError("homogeneity statistic undefined: zero within-group deviation spread");
    }
    double w = (d2 / d1) * (between / within);
    return {w, f_sf(w, d1, d2)};
}

TestReport anova_tukey(const GroupedSamples& data, double alpha) {
    data.validate();
    const auto& groups = data.groups;
    const std::size_t k = groups.size();
    std::size_t total = 0;
    for (const auto& g : groups) {
        if (g.size() < 2) throw InputError("analysis of variance needs at least two values per group");
        total += g.size();
    }

    double grand = 0.0;
    std::vector<double> means(k);
    for (std::size_t g = 0; g < k; ++g) {
        means[g] = mean_of(groups[g]);
        grand += means[g] * static_cast<double>(groups[g].size());
    }
    grand /= static_cast<double>(total);

    double ssb = 0.0, ssw = 0.0;
    for (std::size_t g = 0; g < k; ++g) {
        ssb += static_cast<double>(groups[g].size()) * (means[g] - grand) * (means[g] - grand);
        for (double v : groups[g]) ssw += (v - means[g]) * (v - means[g]);
    }
    double d1 = static_cast<double>(k - 1);
    double d2 = static_cast<double>(total - k);
    double msw = ssw / d2;

    TestReport report;
    report.alpha = alpha;
    report.omnibus = "anova";
    if (ssw == 0.0 && ssb == 0.0) {
        report.omnibus_statistic = 0.0;
        report.omnibus_p = 1.0;
    } else if (ssw == 0.0) {
        report.omnibus_statistic = std::numeric_limits<double>::infinity();
        report.omnibus_p = 0.0;
    } else {
        report.omnibus_statistic = (ssb / d1) / msw;
        report.omnibus_p = f_sf(report.omnibus_statistic, d1, d2);
    }

    report.posthoc = "tukey-kramer";
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = i + 1; j < k; ++j) {
            PairwiseResult pr;
            pr.i = i;
            pr.j = j;
            double se2 = 0.5 * msw * (1.0 / static_cast<double>(groups[i].size()) +
                                      1.0 / static_cast<double>(groups[j].size()));
            if (se2 <= 0.0) {
                pr.statistic = std::numeric_limits<double>::infinity();
                pr.p_adjusted = means[i] == means[j] ? 1.0 : 0.0;
            } else {
                pr.statistic = std::fabs(means[i] - means[j]) / std::sqrt(se2);
                pr.p_adjusted = 1.0 - studentized_range_cdf(pr.statistic, static_cast<double>(k), d2);
                pr.p_adjusted = std::clamp(pr.p_adjusted, 0.0, 1.0);
            }
            pr.significant = pr.p_adjusted < alpha;
            report.pairwise.push_back(pr);
        }
    }
    return report;
}

TestReport kruskal_dunn(const GroupedSamples& data, double alpha) {
    data.validate();
    const auto& groups = data.groups;
    const std::size_t k = groups.size();
    std::size_t total = 0;
    for (const auto& g : groups) total += g.size();

    TestReport report;
    report.alpha = alpha;
    report.omnibus = "kruskal-wallis";
    if (total < 5)
        report.warnings.push_back("fewer than 5 observations in total; the rank test is underpowered");

    std::vector<std::size_t> tie_sizes;
    auto ranks = midranks(groups, &tie_sizes);
    const double nn = static_cast<double>(total);

    std::vector<double> rank_means(k);
    double h = 0.0;
    for (std::size_t g = 0; g < k; ++g) {
        double rsum = std::accumulate(ranks[g].begin(), ranks[g].end(), 0.0);
        rank_means[g] = rsum / static_cast<double>(groups[g].size());
        h += rsum * rsum / static_cast<double>(groups[g].size());
    }
    h = 12.0 / (nn * (nn + 1.0)) * h - 3.0 * (nn + 1.0);

    double tie_term = 0.0;
    for (std::size_t t : tie_sizes) {
        double td = static_cast<double>(t);
        tie_term += td * td * td - td;
    }
    double correction = 1.0 - tie_term / (nn * nn * nn - nn);
    if (correction <= 0.0)
        throw InputError("rank test undefined: every observation is tied");
    h /= correction;

    report.omnibus_statistic = h;
    report.omnibus_p = chi2_sf(h, static_cast<double>(k - 1));

    report.posthoc = "dunn-bonferroni";
    const double comparisons = static_cast<double>(k * (k - 1) / 2);
    // dunn pooled variance with tie adjustment
    double base_var = nn * (nn + 1.0) / 12.0 - tie_term / (12.0 * (nn - 1.0));
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = i + 1; j < k; ++j) {
            PairwiseResult pr;
            pr.i = i;
            pr.j = j;
            double se = std::sqrt(base_var * (1.0 / static_cast<double>(groups[i].size()) +
                                              1.0 / static_cast<double>(groups[j].size())));
            if (se <= 0.0) {
                pr.statistic = 0.0;
                pr.p_adjusted = 1.0;
            } else {
                pr.statistic = std::fabs(rank_means[i] - rank_means[j]) / se;
                double p_raw = 2.0 * (1.0 - normal_cdf(pr.statistic));
                pr.p_adjusted = std::min(1.0, p_raw * comparisons);
            }
            pr.significant = pr.p_adjusted < alpha;
            report.pairwise.push_back(pr);
        }
    }
    return report;
}

TestReport select_and_run(const GroupedSamples& data, double alpha) {
    data.validate();
    for (const auto& g : data.groups)
        if (g.size() < 3)
            throw InputError("routing needs at least 3 values per group for the normality screen");

    bool all_normal = true;
    std::vector<TestReport::Normality> normality;
    for (std::size_t g = 0; g < data.groups.size(); ++g) {
        double w = 0.0, p = 0.0;
        auto [mn, mx] = std::minmax_element(data.groups[g].begin(), data.groups[g].end());
        if (*mn < *mx) {
            std::tie(w, p) = shapiro_wilk(data.groups[g]);
        }
        // a constant sample cannot pass the normality screen; leave w = p = 0
        TestReport::Normality entry;
        entry.group = g < data.names.size() ? data.names[g] : "group" + std::to_string(g);
        entry.w = w;
        entry.p = p;
        normality.push_back(entry);
        if (p <= alpha) all_normal = false;
    }
    auto [lw, lp] = levene(data.groups);
    bool homogeneous = lp > alpha;

    TestReport report = (all_normal && homogeneous) ? anova_tukey(data, alpha)
                                                    : kruskal_dunn(data, alpha);
    report.normality = std::move(normality);
    report.levene_statistic = lw;
    report.levene_p = lp;
    report.levene_run = true;
    return report;
}

}  // namespace spheroid
