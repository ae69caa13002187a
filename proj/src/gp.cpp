// Gaussian-process fit, prediction and serialization.
#include "spheroid/gp.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>

#include "spheroid/csv.hpp"
#include "spheroid/design.hpp"
#include "spheroid/error.hpp"
#include "spheroid/optim.hpp"

namespace spheroid {

namespace {

constexpr double kJitterStart = 1e-12;  // relative to sigma2
constexpr double kJitterMax = 1e-4;     // relative escalation ceiling

// fnv-1a over the canonical text of the training data
std::string data_digest(const Eigen::MatrixXd& inputs, const Eigen::VectorXd& outputs) {
    std::uint64_t h = 1469598103934665603ull;
    auto mix = [&](const std::string& s) {
        for (unsigned char c : s) {
            h ^= c;
            h *= 1099511628211ull;
        }
        h ^= '\n';
        h *= 1099511628211ull;
    };
    for (Eigen::Index i = 0; i < inputs.rows(); ++i) {
        for (Eigen::Index j = 0; j < inputs.cols(); ++j) mix(format_double(inputs(i, j)));
        mix(format_double(outputs(i)));
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

Eigen::MatrixXd normalize_inputs(const Eigen::MatrixXd& raw, const std::vector<Bounds>& box) {
    Eigen::MatrixXd out(raw.rows(), raw.cols());
    for (Eigen::Index j = 0; j < raw.cols(); ++j) {
        const auto& b = box[static_cast<std::size_t>(j)];
        double span = b.hi - b.lo;
        for (Eigen::Index i = 0; i < raw.rows(); ++i)
            out(i, j) = span == 0.0 ? 0.0 : (raw(i, j) - b.lo) / span;
    }
    return out;
}

// squared scaled distance between normalized points
double scaled_sqdist(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                     const Eigen::VectorXd& ls) {
    double s = 0.0;
    for (Eigen::Index d = 0; d < a.size(); ++d) {
        double diff = (a(d) - b(d)) / ls(d);
        s += diff * diff;
    }
    return s;
}

// inputs pre-divided by lengthscales; avoids temporaries in the n^2 loop
Eigen::MatrixXd kernel_matrix(const Eigen::MatrixXd& z, double s2) {
    const Eigen::Index n = z.rows();
    Eigen::MatrixXd k(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        k(i, i) = s2;
        for (Eigen::Index j = i + 1; j < n; ++j) {
            double v = s2 * std::exp(-0.5 * (z.row(i) - z.row(j)).squaredNorm());
            k(i, j) = v;
            k(j, i) = v;
        }
    }
    return k;
}

Eigen::MatrixXd scale_columns(const Eigen::MatrixXd& x, const Eigen::VectorXd& ls) {
    Eigen::MatrixXd z = x;
    for (Eigen::Index d = 0; d < z.cols(); ++d) z.col(d) /= ls(d);
    return z;
}

struct FactorizeOutcome {
    Eigen::MatrixXd l;
    double jitter = 0.0;
    bool ok = false;
};

FactorizeOutcome cholesky_with_jitter(const Eigen::MatrixXd& k, double sigma2, double noise) {
    FactorizeOutcome out;
    Eigen::MatrixXd m = k;
    m.diagonal().array() += noise;
    double jitter = 0.0;
    for (;;) {
        Eigen::LLT<Eigen::MatrixXd> llt(m);
        if (llt.info() == Eigen::Success) {
            out.l = llt.matrixL();
            out.jitter = jitter;
            out.ok = true;
            return out;
        }
        double next = jitter == 0.0 ? kJitterStart * sigma2 : jitter * 10.0;
        if (next > kJitterMax * sigma2) return out;
        m.diagonal().array() += next - jitter;
        jitter = next;
    }
}

double log_marginal(const Eigen::MatrixXd& l, const Eigen::VectorXd& alpha,
                    const Eigen::VectorXd& y) {
    double logdet = 0.0;
    for (Eigen::Index i = 0; i < l.rows(); ++i) logdet += std::log(l(i, i));
    return -0.5 * y.dot(alpha) - logdet -
           0.5 * static_cast<double>(y.size()) * std::log(2.0 * std::numbers::pi);
}

}  // namespace

void TrainingSet::validate() const {
    if (inputs.rows() < 2) throw InputError("training set needs at least 2 rows");
    if (inputs.rows() != outputs.size())
        throw InputError("training inputs and outputs disagree on row count");
    if (static_cast<std::size_t>(inputs.cols()) != box.size())
        throw InputError("training bounds do not match the input dimension");
    for (const auto& b : box)
        if (b.hi < b.lo) throw InputError("training bound with hi < lo");
    for (Eigen::Index i = 0; i < outputs.size(); ++i)
        if (!std::isfinite(outputs(i))) throw InputError("non-finite training output");
}

double rbf_kernel(const Eigen::VectorXd& a, const Eigen::VectorXd& b, double sigma2,
                  const Eigen::VectorXd& lengthscales) {
    if (a.size() != b.size() || a.size() != lengthscales.size())
        throw InputError("kernel input dimensions disagree");
    for (Eigen::Index d = 0; d < lengthscales.size(); ++d)
        if (!(lengthscales(d) > 0.0)) throw InputError("lengthscales must be positive");
    return sigma2 * std::exp(-0.5 * scaled_sqdist(a, b, lengthscales));
}

Eigen::VectorXd GPModel::normalize(const std::vector<double>& x_raw, bool* outside) const {
    if (x_raw.size() != box_.size()) throw InputError("prediction input dimension mismatch");
    Eigen::VectorXd xn(static_cast<Eigen::Index>(x_raw.size()));
    bool out = false;
    for (std::size_t d = 0; d < x_raw.size(); ++d) {
        double span = box_[d].hi - box_[d].lo;
        double v = span == 0.0 ? 0.0 : (x_raw[d] - box_[d].lo) / span;
        if (v < 0.0 || v > 1.0) out = true;
        xn(static_cast<Eigen::Index>(d)) = v;
    }
    if (outside) *outside = out;
    return xn;
}

void GPModel::factorize() {
    const Eigen::Index n = x_.rows();
    Eigen::VectorXd y_std(n);
    for (Eigen::Index i = 0; i < n; ++i) y_std(i) = (y_raw_(i) - y_mean_) / y_sd_;

    z_ = scale_columns(x_, lengthscales_);
    Eigen::MatrixXd k = kernel_matrix(z_, sigma2_);
    auto fact = cholesky_with_jitter(k, sigma2_, noise_);
    if (!fact.ok)
        throw NumericalError("covariance factorization failed after jitter escalation");
    l_ = std::move(fact.l);
    jitter_ = fact.jitter;
    alpha_ = l_.triangularView<Eigen::Lower>().solve(y_std);
    alpha_ = l_.transpose().triangularView<Eigen::Upper>().solve(alpha_);
    log_marginal_ = log_marginal(l_, alpha_, y_std);
}

GPModel::Prediction GPModel::predict(const std::vector<double>& x_raw) const {
    Prediction p;
    Eigen::VectorXd xn = normalize(x_raw, &p.extrapolated);
    Eigen::VectorXd zn = xn.cwiseQuotient(lengthscales_);
    const Eigen::Index n = z_.rows();
    Eigen::VectorXd kstar(n);
    for (Eigen::Index i = 0; i < n; ++i)
        kstar(i) = sigma2_ * std::exp(-0.5 * (z_.row(i).transpose() - zn).squaredNorm());
    double mean_std = kstar.dot(alpha_);
    Eigen::VectorXd v = l_.triangularView<Eigen::Lower>().solve(kstar);
    double var_std = sigma2_ - v.squaredNorm();
    if (var_std < 1e-12) var_std = 0.0;
    p.mean = y_mean_ + y_sd_ * mean_std;
    p.variance = var_std * y_sd_ * y_sd_;
    return p;
}

GPModel fit_gp(const TrainingSet& data, std::size_t restarts, Draws& draws) {
    data.validate();
    if (restarts < 1) throw InputError("fit needs at least one restart");

    GPModel model;
    model.box_ = data.box;
    model.x_ = normalize_inputs(data.inputs, data.box);
    model.y_raw_ = data.outputs;
    model.y_mean_ = data.outputs.mean();
    double var = (data.outputs.array() - model.y_mean_).square().sum() /
                 static_cast<double>(data.outputs.size());
    model.y_sd_ = var > 0.0 ? std::sqrt(var) : 1.0;
    model.digest_ = data_digest(data.inputs, data.outputs);

    const Eigen::Index n = model.x_.rows();
    const Eigen::Index dim = model.x_.cols();
    Eigen::VectorXd y_std(n);
    for (Eigen::Index i = 0; i < n; ++i) y_std(i) = (model.y_raw_(i) - model.y_mean_) / model.y_sd_;

    // hyperparameter vector: log sigma2, log l_1..l_dim, log noise
    const std::size_t hdim = static_cast<std::size_t>(dim) + 2;
    const double lo_s2 = std::log(1e-3), hi_s2 = std::log(1e3);
    const double lo_l = std::log(0.03), hi_l = std::log(30.0);
    const double lo_n = std::log(1e-8), hi_n = std::log(10.0);

    auto objective = [&](const std::vector<double>& h) {
        if (h[0] < lo_s2 || h[0] > hi_s2) return -std::numeric_limits<double>::infinity();
        for (Eigen::Index d = 0; d < dim; ++d) {
            double v = h[static_cast<std::size_t>(d) + 1];
            if (v < lo_l || v > hi_l) return -std::numeric_limits<double>::infinity();
        }
        if (h[hdim - 1] < lo_n || h[hdim - 1] > hi_n)
            return -std::numeric_limits<double>::infinity();

        double s2 = std::exp(h[0]);
        Eigen::VectorXd ls(dim);
        for (Eigen::Index d = 0; d < dim; ++d) ls(d) = std::exp(h[static_cast<std::size_t>(d) + 1]);
        double noise = std::exp(h[hdim - 1]);

        Eigen::MatrixXd k = kernel_matrix(scale_columns(model.x_, ls), s2);
        auto fact = cholesky_with_jitter(k, s2, noise);
        if (!fact.ok) return -std::numeric_limits<double>::infinity();
        Eigen::VectorXd alpha = fact.l.triangularView<Eigen::Lower>().solve(y_std);
        alpha = fact.l.transpose().triangularView<Eigen::Upper>().solve(alpha);
        return log_marginal(fact.l, alpha, y_std);
    };

    // one heuristic start plus latin-hypercube restarts over the log box
    std::vector<std::vector<double>> starts;
    {
        std::vector<double> h(hdim);
        h[0] = 0.0;
        for (std::size_t d = 1; d + 1 < hdim; ++d) h[d] = std::log(0.5);
        h[hdim - 1] = std::log(1e-4);
        starts.push_back(h);
    }
    if (restarts > 1) {
        auto lhs = latin_hypercube(restarts - 1, hdim, draws);
        for (const auto& u : lhs) {
            std::vector<double> h(hdim);
            h[0] = lo_s2 + (hi_s2 - lo_s2) * u[0];
            for (std::size_t d = 1; d + 1 < hdim; ++d) h[d] = lo_l + (hi_l - lo_l) * u[d];
            h[hdim - 1] = lo_n + (hi_n - lo_n) * u[hdim - 1];
            starts.push_back(h);
        }
    }

    double best = -std::numeric_limits<double>::infinity();
    std::vector<double> best_h;
    std::vector<double> step(hdim, 0.4);
    for (const auto& h0 : starts) {
        auto r = nelder_mead_max(objective, h0, step, 80 * hdim, 1e-5);
        if (r.value > best) {
            best = r.value;
            best_h = r.x;
        }
    }
    if (!std::isfinite(best))
        throw NumericalError("no hyperparameter start produced a valid factorization");

    model.sigma2_ = std::exp(best_h[0]);
    model.lengthscales_.resize(dim);
    for (Eigen::Index d = 0; d < dim; ++d)
        model.lengthscales_(d) = std::exp(best_h[static_cast<std::size_t>(d) + 1]);
    model.noise_ = std::exp(best_h[hdim - 1]);
    model.factorize();
    return model;
}

double q2(const GPModel& model, const Eigen::MatrixXd& test_inputs,
          const Eigen::VectorXd& test_outputs) {
    if (test_inputs.rows() < 2) throw InputError("efficiency needs at least 2 test points");
    if (test_inputs.rows() != test_outputs.size())
        throw InputError("test inputs and outputs disagree on row count");
    double fbar = test_outputs.mean();
    double denom = (test_outputs.array() - fbar).square().sum();
    if (denom == 0.0) throw InputError("efficiency undefined: zero test-output variance");
    double num = 0.0;
    for (Eigen::Index i = 0; i < test_inputs.rows(); ++i) {
        std::vector<double> x(test_inputs.cols());
        for (Eigen::Index j = 0; j < test_inputs.cols(); ++j) x[static_cast<std::size_t>(j)] = test_inputs(i, j);
        double m = model.predict(x).mean;
        num += (m - test_outputs(i)) * (m - test_outputs(i));
    }
    return 1.0 - num / denom;
}

void GPModel::save(const std::string& path) const {
    nlohmann::json j;
    j["kind"] = "gp-rbf-ard";
    j["version"] = 1;
    j["sigma2"] = sigma2_;
    j["noise_variance"] = noise_;
    j["jitter"] = jitter_;
    j["y_mean"] = y_mean_;
    j["y_sd"] = y_sd_;
    j["training_digest"] = digest_;
    j["lengthscales"] = std::vector<double>(lengthscales_.data(), lengthscales_.data() + lengthscales_.size());
    nlohmann::json jb = nlohmann::json::array();
    for (const auto& b : box_) jb.push_back({{"lo", b.lo}, {"hi", b.hi}});
    j["bounds"] = jb;
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < x_.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index d = 0; d < x_.cols(); ++d) row.push_back(x_(i, d));
        rows.push_back(row);
    }
    j["inputs_normalized"] = rows;
    j["outputs_raw"] = std::vector<double>(y_raw_.data(), y_raw_.data() + y_raw_.size());
    std::ofstream out(path);
    if (!out) throw InputError("cannot open '" + path + "' for writing");
    out << j.dump(1) << '\n';
}

GPModel GPModel::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open '" + path + "' for reading");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw InputError("malformed model artifact '" + path + "': " + e.what());
    }
    try {
        if (j.at("kind") != "gp-rbf-ard") throw InputError("'" + path + "' is not a gp artifact");
        if (j.at("version").get<int>() != 1)
            throw InputError("'" + path + "' has an unsupported artifact version");
        GPModel m;
        m.sigma2_ = j.at("sigma2").get<double>();
        m.noise_ = j.at("noise_variance").get<double>();
        m.y_mean_ = j.at("y_mean").get<double>();
        m.y_sd_ = j.at("y_sd").get<double>();
        m.digest_ = j.at("training_digest").get<std::string>();
        auto ls = j.at("lengthscales").get<std::vector<double>>();
        m.lengthscales_ = Eigen::Map<Eigen::VectorXd>(ls.data(), static_cast<Eigen::Index>(ls.size()));
        for (const auto& b : j.at("bounds")) m.box_.push_back({b.at("lo").get<double>(), b.at("hi").get<double>()});
        const auto& rows = j.at("inputs_normalized");
        auto outs = j.at("outputs_raw").get<std::vector<double>>();
        if (!(m.sigma2_ > 0.0) || !(m.y_sd_ > 0.0) || m.noise_ < 0.0)
            throw InputError("model artifact '" + path + "' has invalid hyperparameters");
        for (double l : ls)
            if (!(l > 0.0)) throw InputError("model artifact '" + path + "' has invalid lengthscales");
        if (ls.size() != m.box_.size() || rows.size() != outs.size() || rows.size() < 2)
            throw InputError("model artifact '" + path + "' has inconsistent dimensions");
        m.x_.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(m.box_.size()));
        for (Eigen::Index i = 0; i < m.x_.rows(); ++i) {
            const auto& row = rows[static_cast<std::size_t>(i)];
            if (row.size() != m.box_.size())
                throw InputError("model artifact '" + path + "' has inconsistent dimensions");
            for (Eigen::Index d = 0; d < m.x_.cols(); ++d)
                m.x_(i, d) = row[static_cast<std::size_t>(d)].get<double>();
        }
        m.y_raw_ = Eigen::Map<Eigen::VectorXd>(outs.data(), static_cast<Eigen::Index>(outs.size()));
        m.factorize();
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw InputError("model artifact '" + path + "' missing fields: " + e.what());
    }
}

}  // namespace spheroid
