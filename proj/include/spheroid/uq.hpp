// Uncertainty pipeline over an emulated response: marginalized response
// curves, variance-based sensitivity indices via Saltelli cross-sampling,
// and Bayesian calibration with an adaptive random-walk sampler.
#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "spheroid/gp.hpp"
#include "spheroid/params.hpp"
#include "spheroid/rng.hpp"

namespace spheroid {

using ModelFn = std::function<double(const std::vector<double>&)>;

struct SobolResult {
    std::vector<double> first_order;   // S1 per parameter
    std::vector<double> total_order;   // ST per parameter
    Eigen::MatrixXd second_order;      // S2, upper triangle (i < j), zero elsewhere
    std::size_t base_samples = 0;      // N
    std::size_t evaluations = 0;       // N (2J + 2) with second order
    double output_variance = 0.0;
};

// Saltelli scheme on a digitally shifted Sobol base sequence. n must be a
// power of two >= 1024. Fixed parameters (degenerate bounds) get exact zero
// first/total indices and zeroed interaction rows.
SobolResult sobol_indices(const ModelFn& f, const std::vector<Bounds>& box, std::size_t n,
                          Draws& draws);

struct MarginalPoint {
    double value = 0.0;  // grid position in the chosen dimension
    double mean = 0.0;   // average predicted mean over the other dimensions
    double lo = 0.0;     // 2.5 percentile of the predicted means
    double hi = 0.0;     // 97.5 percentile
};

// Averages model predictions over m uniform settings of the other
// parameters at each grid value of dimension dim.
std::vector<MarginalPoint> marginal_response(const GPModel& model, std::size_t dim,
                                             const std::vector<double>& grid, std::size_t m,
                                             Draws& draws);

struct ObservationSet {
    std::string group;
    struct Day {
        int day = 0;
        std::vector<double> areas_um2;
        double sigma_n = 0.0;  // gaussian noise scale for the likelihood
    };
    std::vector<Day> days;  // strictly increasing day indices

    void validate() const;
};

// Sum over days and observations of log N(y | model_day(theta).mean, sigma_n^2).
// Returns -infinity outside the support box.
double log_likelihood(const std::vector<double>& theta, const ObservationSet& obs,
                      const std::map<int, GPModel>& models, const std::vector<Bounds>& support);

struct McmcOptions {
    std::size_t chains = 4;
    std::size_t draws_per_chain = 5000;  // retained after burn-in
    std::size_t burn_in = 5000;
    double target_acceptance = 0.3;
    double rhat_warn_threshold = 1.1;
};

struct Posterior {
    Eigen::MatrixXd samples;           // (chains * draws) x J
    std::vector<double> log_density;   // per retained draw
    std::vector<double> joint_map;     // argmax draw refined by hill-climb
    double joint_map_log_density = 0.0;
    std::vector<double> marginal_map;  // kernel-density mode per parameter
    std::vector<double> rhat;          // split-Rhat per parameter (1.0 for fixed)
    double acceptance_rate = 0.0;
    std::vector<std::string> warnings;
};

// Adaptive random-walk Metropolis with reflection at the prior bounds.
// Chains use independent substreams of base; adaptation freezes after
// burn-in. log_post must return -infinity outside the support.
Posterior mcmc_sample(const std::function<double(const std::vector<double>&)>& log_post,
                      const std::vector<Bounds>& priors, const McmcOptions& opts,
                      const RngStream& base);

// Convenience wrapper for the observation/emulator likelihood.
Posterior calibrate(const ObservationSet& obs, const std::map<int, GPModel>& models,
                    const std::vector<Bounds>& priors, const McmcOptions& opts,
                    const RngStream& base);

}  // namespace spheroid
