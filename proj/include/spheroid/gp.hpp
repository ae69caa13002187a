// Gaussian-process regression with a squared-exponential kernel and
// per-dimension lengthscales. Inputs are min-max normalized to the unit box
// given by the training bounds; outputs are standardized internally.
// Hyperparameters maximize the log marginal likelihood via multi-start
// simplex search.
#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <string>
#include <vector>

#include "spheroid/params.hpp"
#include "spheroid/rng.hpp"

namespace spheroid {

struct TrainingSet {
    Eigen::MatrixXd inputs;   // N x J, raw parameter units
    Eigen::VectorXd outputs;  // N responses
    std::vector<Bounds> box;  // J normalization bounds

    void validate() const;
};

// sigma2 * exp(-sum_d (a_d - b_d)^2 / (2 l_d^2)); a and b in normalized units.
double rbf_kernel(const Eigen::VectorXd& a, const Eigen::VectorXd& b, double sigma2,
                  const Eigen::VectorXd& lengthscales);

class GPModel {
public:
    struct Prediction {
        double mean = 0.0;
        double variance = 0.0;  // raw output units squared
        bool extrapolated = false;
    };

    Prediction predict(const std::vector<double>& x_raw) const;

    double sigma2() const { return sigma2_; }
    const Eigen::VectorXd& lengthscales() const { return lengthscales_; }
    double noise_variance() const { return noise_; }
    double log_marginal_likelihood() const { return log_marginal_; }
    const std::vector<Bounds>& box() const { return box_; }
    std::size_t training_size() const { return static_cast<std::size_t>(x_.rows()); }
    std::size_t input_dim() const { return static_cast<std::size_t>(x_.cols()); }
    const std::string& training_digest() const { return digest_; }

    Eigen::VectorXd normalize(const std::vector<double>& x_raw, bool* outside = nullptr) const;

    // Serialization to a self-describing JSON artifact (hyperparameters,
    // bounds, training data, digest). load rebuilds the factorization.
    void save(const std::string& path) const;
    static GPModel load(const std::string& path);

    friend GPModel fit_gp(const TrainingSet& data, std::size_t restarts, Draws& draws);

private:
    void factorize();  // builds L and alpha from hyperparameters + data

    double sigma2_ = 1.0;
    Eigen::VectorXd lengthscales_;
    double noise_ = 1e-6;  // variance in standardized units
    std::vector<Bounds> box_;
    Eigen::MatrixXd x_;       // N x J normalized training inputs
    Eigen::MatrixXd z_;       // x_ with columns divided by the lengthscales
    Eigen::VectorXd y_raw_;   // N raw outputs (kept for serialization and q2 bookkeeping)
    Eigen::MatrixXd l_;       // cholesky factor of K + (noise + jitter) I
    Eigen::VectorXd alpha_;   // solves (K + (noise + jitter) I) alpha = y_std
    double y_mean_ = 0.0;
    double y_sd_ = 1.0;
    double jitter_ = 0.0;  // extra diagonal needed for factorization
    double log_marginal_ = 0.0;
    std::string digest_;
};

// Multi-start maximum-likelihood fit; restarts >= 1. Draws supplies the
// Latin-hypercube restart points.
GPModel fit_gp(const TrainingSet& data, std::size_t restarts, Draws& draws);

// Nash-Sutcliffe efficiency of model predictions against held-out data:
// 1 - sum (m - f)^2 / sum (f - fbar)^2. Needs >= 2 points with spread.
double q2(const GPModel& model, const Eigen::MatrixXd& test_inputs,
          const Eigen::VectorXd& test_outputs);

}  // namespace spheroid
