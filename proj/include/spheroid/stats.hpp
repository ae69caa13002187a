// Group-comparison battery: per-group normality screening and variance
// homogeneity route the data to either one-way ANOVA with Tukey-Kramer
// post-hoc or Kruskal-Wallis with Dunn post-hoc.
#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace spheroid {

struct GroupedSamples {
    std::vector<std::string> names;
    std::vector<std::vector<double>> groups;

    void validate() const;  // >= 2 groups, sizes match names
};

struct PairwiseResult {
    std::size_t i = 0;  // group indices
    std::size_t j = 0;
    double statistic = 0.0;   // studentized range q or Dunn z
    double p_adjusted = 1.0;  // Tukey-distribution p or Bonferroni-adjusted
    bool significant = false;
};

struct TestReport {
    struct Normality {
        std::string group;
        double w = 0.0;
        double p = 0.0;
    };
    std::vector<Normality> normality;     // filled by select_and_run
    double levene_statistic = 0.0;
    double levene_p = 0.0;
    bool levene_run = false;
    std::string omnibus;                  // "anova" or "kruskal-wallis"
    double omnibus_statistic = 0.0;
    double omnibus_p = 0.0;
    std::string posthoc;                  // "tukey-kramer" or "dunn-bonferroni"
    std::vector<PairwiseResult> pairwise;
    double alpha = 0.05;
    std::vector<std::string> warnings;
};

// Small-sample W with the established coefficient approximation; valid for
// 3 <= n <= 50. Returns (W, p). Constant samples are an error.
std::pair<double, double> shapiro_wilk(std::vector<double> sample);

// Mean-centered variance homogeneity statistic with its F p-value.
std::pair<double, double> levene(const std::vector<std::vector<double>>& groups);

// One-way F test plus Tukey-Kramer pairwise comparisons (unequal n).
TestReport anova_tukey(const GroupedSamples& data, double alpha = 0.05);

// Tie-corrected Kruskal-Wallis H plus Dunn z pairwise comparisons with
// Bonferroni adjustment. Total n < 5 attaches an underpowered warning.
TestReport kruskal_dunn(const GroupedSamples& data, double alpha = 0.05);

// Full battery: normality per group and homogeneity across groups choose
// the omnibus route; everything lands in one report.
TestReport select_and_run(const GroupedSamples& data, double alpha = 0.05);

// Cumulative distribution of the studentized range with k groups and nu
// error degrees of freedom; exposed for oracle tests.
double studentized_range_cdf(double q, double k, double nu);

}  // namespace spheroid
