// Sensitivity indices, marginal curves and the calibration sampler.
#include "spheroid/uq.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>

#include "spheroid/design.hpp"
#include "spheroid/error.hpp"
#include "spheroid/optim.hpp"

namespace spheroid {

namespace {

double percentile(std::vector<double> v, double p) {
    std::sort(v.begin(), v.end());
    double idx = p * static_cast<double>(v.size() - 1);
    auto lo = static_cast<std::size_t>(idx);
    if (lo + 1 >= v.size()) return v.back();
    double frac = idx - static_cast<double>(lo);
    return v[lo] * (1.0 - frac) + v[lo + 1] * frac;
}

bool inside_box(const std::vector<double>& theta, const std::vector<Bounds>& box) {
    if (theta.size() != box.size()) throw InputError("parameter vector dimension mismatch");
    for (std::size_t d = 0; d < box.size(); ++d)
        if (theta[d] < box[d].lo || theta[d] > box[d].hi) return false;
    return true;
}

// split-Rhat over per-chain sequences, each split in half
double split_rhat(const std::vector<std::vector<double>>& chains) {
    std::vector<std::vector<double>> halves;
    for (const auto& c : chains) {
        std::size_t h = c.size() / 2;
        halves.emplace_back(c.begin(), c.begin() + h);
        halves.emplace_back(c.begin() + h, c.begin() + 2 * h);
    }
    const double m = static_cast<double>(halves.size());
    const double n = static_cast<double>(halves.front().size());
    if (n < 2.0) return 1.0;
    std::vector<double> means;
    double grand = 0.0;
    double w = 0.0;
    for (const auto& h : halves) {
        double mu = 0.0;
        for (double v : h) mu += v;
        mu /= n;
        double s2 = 0.0;
        for (double v : h) s2 += (v - mu) * (v - mu);
        s2 /= (n - 1.0);
        means.push_back(mu);
        grand += mu / m;
        w += s2 / m;
    }
    double b = 0.0;
    for (double mu : means) b += (mu - grand) * (mu - grand);
    b *= n / (m - 1.0);
    if (w <= 0.0) return 1.0;  // frozen dimension
    double var_plus = (n - 1.0) / n * w + b / n;
    return std::sqrt(var_plus / w);
}

}  // namespace

SobolResult sobol_indices(const ModelFn& f, const std::vector<Bounds>& box, std::size_t n,
                          Draws& draws) {
    const std::size_t dim = box.size();
    if (dim == 0) throw InputError("sensitivity analysis needs at least one parameter");
    if (n < 1024 || (n & (n - 1)) != 0)
        throw InputError("base sample size must be a power of two >= 1024");

    auto unit = sobol_points(n, 2 * dim, draws);

    std::vector<std::vector<double>> a(n, std::vector<double>(dim));
    std::vector<std::vector<double>> b(n, std::vector<double>(dim));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t d = 0; d < dim; ++d) {
            a[i][d] = box[d].lo + (box[d].hi - box[d].lo) * unit[i][d];
            b[i][d] = box[d].lo + (box[d].hi - box[d].lo) * unit[i][dim + d];
        }
    }

    SobolResult res;
    res.base_samples = n;
    std::vector<double> fa(n), fb(n);
    for (std::size_t i = 0; i < n; ++i) {
        fa[i] = f(a[i]);
        fb[i] = f(b[i]);
    }
    res.evaluations = 2 * n;

    double mean_a = 0.0, mean_b = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mean_a += fa[i];
        mean_b += fb[i];
    }
    mean_a /= static_cast<double>(n);
    mean_b /= static_cast<double>(n);
    double f0 = 0.5 * (mean_a + mean_b);
    double var = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        var += (fa[i] - f0) * (fa[i] - f0) + (fb[i] - f0) * (fb[i] - f0);
    var /= static_cast<double>(2 * n);
    res.output_variance = var;
    if (!(var > 0.0))
        throw NumericalError("model output variance is zero; indices undefined");

    res.first_order.assign(dim, 0.0);
    res.total_order.assign(dim, 0.0);
    res.second_order = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dim),
                                             static_cast<Eigen::Index>(dim));

    // f(AB_d) and f(BA_d) per moving dimension
    std::vector<std::vector<double>> fab(dim, std::vector<double>(n));
    std::vector<std::vector<double>> fba(dim, std::vector<double>(n));
    std::vector<double> point(dim);
    for (std::size_t d = 0; d < dim; ++d) {
        if (box[d].degenerate()) {
            fab[d] = fa;
            fba[d] = fb;
            continue;
        }
        for (std::size_t i = 0; i < n; ++i) {
            point = a[i];
            point[d] = b[i][d];
            fab[d][i] = f(point);
            point = b[i];
            point[d] = a[i][d];
            fba[d][i] = f(point);
        }
        res.evaluations += 2 * n;
    }

    for (std::size_t d = 0; d < dim; ++d) {
        if (box[d].degenerate()) continue;  // exact zeros by definition
        double s1 = 0.0, st = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            s1 += fb[i] * (fab[d][i] - fa[i]);
            st += (fa[i] - fab[d][i]) * (fa[i] - fab[d][i]);
        }
        res.first_order[d] = s1 / static_cast<double>(n) / var;
        res.total_order[d] = 0.5 * st / static_cast<double>(n) / var;
    }

    for (std::size_t p = 0; p < dim; ++p) {
        for (std::size_t q = p + 1; q < dim; ++q) {
            if (box[p].degenerate() || box[q].degenerate()) continue;
            double cross = 0.0;
            for (std::size_t i = 0; i < n; ++i) cross += fba[p][i] * fab[q][i];
            cross = cross / static_cast<double>(n) - mean_a * mean_b;
            res.second_order(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(q)) =
                cross / var - res.first_order[p] - res.first_order[q];
        }
    }
    return res;
}

std::vector<MarginalPoint> marginal_response(const GPModel& model, std::size_t dim,
                                             const std::vector<double>& grid, std::size_t m,
                                             Draws& draws) {
    const auto& box = model.box();
    if (dim >= box.size()) throw InputError("marginal dimension out of range");
    if (m < 100) throw InputError("marginalization needs at least 100 samples");
    for (double g : grid)
        if (g < box[dim].lo || g > box[dim].hi)
            throw InputError("marginal grid value outside the parameter bounds");

    // one shared set of backgrounds so the curve varies only through dim
    std::vector<std::vector<double>> background(m, std::vector<double>(box.size()));
    for (std::size_t k = 0; k < m; ++k)
        for (std::size_t d = 0; d < box.size(); ++d)
            background[k][d] = box[d].lo + (box[d].hi - box[d].lo) * draws.uniform();

    std::vector<MarginalPoint> curve;
    curve.reserve(grid.size());
    std::vector<double> means(m);
    for (double g : grid) {
        for (std::size_t k = 0; k < m; ++k) {
            background[k][dim] = g;
            means[k] = model.predict(background[k]).mean;
        }
        MarginalPoint pt;
        pt.value = g;
        double mu = 0.0;
        for (double v : means) mu += v;
        pt.mean = mu / static_cast<double>(m);
        pt.lo = percentile(means, 0.025);
        pt.hi = percentile(means, 0.975);
        curve.push_back(pt);
    }
    return curve;
}

void ObservationSet::validate() const {
    if (days.empty()) throw InputError("observation set has no days");
    int prev = std::numeric_limits<int>::min();
    for (const auto& d : days) {
        if (d.day <= prev) throw InputError("observation days must be strictly increasing");
        prev = d.day;
        if (d.areas_um2.empty()) throw InputError("observation day without measurements");
        if (!(d.sigma_n > 0.0)) throw InputError("observation noise scale must be positive");
    }
}

double log_likelihood(const std::vector<double>& theta, const ObservationSet& obs,
                      const std::map<int, GPModel>& models, const std::vector<Bounds>& support) {
    obs.validate();
    if (!inside_box(theta, support)) return -std::numeric_limits<double>::infinity();
    double ll = 0.0;
    for (const auto& day : obs.days) {
        auto it = models.find(day.day);
        if (it == models.end())
            throw InputError("no emulator for observation day " + std::to_string(day.day));
        double mu = it->second.predict(theta).mean;
        double s2 = day.sigma_n * day.sigma_n;
        for (double y : day.areas_um2)
            ll += -0.5 * std::log(2.0 * std::numbers::pi * s2) - (y - mu) * (y - mu) / (2.0 * s2);
    }
    return ll;
}

Posterior mcmc_sample(const std::function<double(const std::vector<double>&)>& log_post,
                      const std::vector<Bounds>& priors, const McmcOptions& opts,
                      const RngStream& base) {
    const std::size_t dim = priors.size();
    if (dim == 0) throw InputError("sampler needs at least one parameter");
    if (opts.chains < 2) throw InputError("sampler needs at least two chains");
    if (opts.draws_per_chain < 10) throw InputError("too few draws per chain");

    const std::size_t total_iters = opts.burn_in + opts.draws_per_chain;
    std::vector<std::vector<std::vector<double>>> chain_samples(
        opts.chains);  // chain -> draw -> theta
    std::vector<std::vector<double>> chain_logp(opts.chains);
    std::uint64_t accepted = 0, proposed = 0;

    for (std::size_t c = 0; c < opts.chains; ++c) {
        // one counter slice per iteration keeps every chain well inside the
        // per-slice draw budget regardless of run length
        RngStream chain_stream = base.with_id(0xC0000 + c);
        std::vector<double> theta(dim);
        double lp = -std::numeric_limits<double>::infinity();
        // keep drawing starts until the density is finite
        for (std::uint64_t attempt = 0; attempt < 1000 && !std::isfinite(lp); ++attempt) {
            auto d0 = chain_stream.draws(rng_purpose::kMcmc, total_iters + attempt);
            for (std::size_t k = 0; k < dim; ++k)
                theta[k] = priors[k].lo + (priors[k].hi - priors[k].lo) * d0.uniform();
            lp = log_post(theta);
        }
        if (!std::isfinite(lp))
            throw NumericalError("could not find a starting point with finite density");

        double log_scale = std::log(0.1);
        std::size_t batch_accept = 0, batch_count = 0, batch_index = 0;
        std::vector<double> prop(dim);
        chain_samples[c].reserve(opts.draws_per_chain);
        chain_logp[c].reserve(opts.draws_per_chain);

        for (std::size_t it = 0; it < total_iters; ++it) {
            auto d = chain_stream.draws(rng_purpose::kMcmc, it);
            double scale = std::exp(log_scale);
            for (std::size_t k = 0; k < dim; ++k) {
                double span = priors[k].hi - priors[k].lo;
                if (span == 0.0) {
                    prop[k] = priors[k].lo;
                    continue;
                }
                double x = theta[k] + scale * span * d.normal();
                // reflect into the box
                for (int r = 0; r < 64; ++r) {
                    if (x < priors[k].lo) x = 2.0 * priors[k].lo - x;
                    else if (x > priors[k].hi) x = 2.0 * priors[k].hi - x;
                    else break;
                }
                if (x < priors[k].lo) x = priors[k].lo;
                if (x > priors[k].hi) x = priors[k].hi;
                prop[k] = x;
            }
            double lp_prop = log_post(prop);
            bool accept = false;
            if (lp_prop >= lp) {
                accept = true;
            } else {
                accept = d.uniform() < std::exp(lp_prop - lp);
            }
            if (accept) {
                theta = prop;
                lp = lp_prop;
            }
            if (it < opts.burn_in) {
                batch_accept += accept ? 1 : 0;
                if (++batch_count == 50) {
                    ++batch_index;
                    double rate = static_cast<double>(batch_accept) / 50.0;
                    double gain = std::min(0.5, 1.0 / std::sqrt(static_cast<double>(batch_index)));
                    log_scale += gain * (rate - opts.target_acceptance);
                    batch_accept = 0;
                    batch_count = 0;
                }
            } else {
                ++proposed;
                accepted += accept ? 1 : 0;
                chain_samples[c].push_back(theta);
                chain_logp[c].push_back(lp);
            }
        }
    }

    Posterior post;
    const std::size_t total = opts.chains * opts.draws_per_chain;
    post.samples.resize(static_cast<Eigen::Index>(total), static_cast<Eigen::Index>(dim));
    post.log_density.reserve(total);
    std::size_t row = 0;
    double best_lp = -std::numeric_limits<double>::infinity();
    std::vector<double> best_theta;
    for (std::size_t c = 0; c < opts.chains; ++c) {
        for (std::size_t i = 0; i < chain_samples[c].size(); ++i, ++row) {
            for (std::size_t k = 0; k < dim; ++k)
                post.samples(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(k)) =
                    chain_samples[c][i][k];
            post.log_density.push_back(chain_logp[c][i]);
            if (chain_logp[c][i] > best_lp) {
                best_lp = chain_logp[c][i];
                best_theta = chain_samples[c][i];
            }
        }
    }
    post.acceptance_rate = proposed ? static_cast<double>(accepted) / static_cast<double>(proposed) : 0.0;

    // split-Rhat per parameter
    post.rhat.assign(dim, 1.0);
    for (std::size_t k = 0; k < dim; ++k) {
        if (priors[k].degenerate()) continue;
        std::vector<std::vector<double>> traces(opts.chains);
        for (std::size_t c = 0; c < opts.chains; ++c)
            for (const auto& s : chain_samples[c]) traces[c].push_back(s[k]);
        post.rhat[k] = split_rhat(traces);
        if (post.rhat[k] > opts.rhat_warn_threshold) {
            char buf[32];
            std::snprintf(buf, sizeof(buf), "%.4f", post.rhat[k]);
            post.warnings.push_back("split-Rhat " + std::string(buf) +
                                    " above threshold for parameter index " + std::to_string(k));
        }
    }

    // joint MAP: best retained draw refined by simplex hill-climb
    std::vector<double> step(dim);
    for (std::size_t k = 0; k < dim; ++k) step[k] = 0.01 * (priors[k].hi - priors[k].lo);
    auto refined = nelder_mead_max(log_post, best_theta, step, 200, 1e-10);
    if (refined.value >= best_lp) {
        post.joint_map = refined.x;
        post.joint_map_log_density = refined.value;
    } else {
        post.joint_map = best_theta;
        post.joint_map_log_density = best_lp;
    }
    for (std::size_t k = 0; k < dim; ++k) {
        post.joint_map[k] = std::clamp(post.joint_map[k], priors[k].lo, priors[k].hi);
    }

    // marginal MAP via gaussian kernel density mode
    post.marginal_map.assign(dim, 0.0);
    for (std::size_t k = 0; k < dim; ++k) {
        if (priors[k].degenerate()) {
            post.marginal_map[k] = priors[k].lo;
            continue;
        }
        std::vector<double> xs;
        xs.reserve(total);
        for (std::size_t r = 0; r < total; ++r)
            xs.push_back(post.samples(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(k)));
        double mu = 0.0;
        for (double v : xs) mu += v;
        mu /= static_cast<double>(xs.size());
        double sd = 0.0;
        for (double v : xs) sd += (v - mu) * (v - mu);
        sd = std::sqrt(sd / static_cast<double>(xs.size() - 1));
        std::vector<double> sorted = xs;
        std::sort(sorted.begin(), sorted.end());
        double iqr = percentile(sorted, 0.75) - percentile(sorted, 0.25);
        double spread = std::min(sd, iqr / 1.34);
        if (spread <= 0.0) spread = sd;
        if (spread <= 0.0) {
            post.marginal_map[k] = mu;
            continue;
        }
        double h = 0.9 * spread * std::pow(static_cast<double>(xs.size()), -0.2);
        double lo = sorted.front(), hi = sorted.back();
        const int grid_n = 256;
        double best_dens = -1.0, best_x = mu;
        for (int gi = 0; gi < grid_n; ++gi) {
            double g = lo + (hi - lo) * static_cast<double>(gi) / (grid_n - 1);
            double dens = 0.0;
            for (double v : xs) {
                double u = (g - v) / h;
                dens += std::exp(-0.5 * u * u);
            }
            if (dens > best_dens) {
                best_dens = dens;
                best_x = g;
            }
        }
        post.marginal_map[k] = best_x;
    }
    return post;
}

Posterior calibrate(const ObservationSet& obs, const std::map<int, GPModel>& models,
                    const std::vector<Bounds>& priors, const McmcOptions& opts,
                    const RngStream& base) {
    auto log_post = [&](const std::vector<double>& theta) {
        return log_likelihood(theta, obs, models, priors);
    };
    return mcmc_sample(log_post, priors, opts, base);
}

}  // namespace spheroid
