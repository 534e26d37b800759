#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "nlem/errors.hpp"

namespace nlem {

// Weighted points in R^d, stored as a flat row-major matrix.
class WeightedPointSet {
public:
    explicit WeightedPointSet(int dim) : dim_(dim) {
        if (dim < 1)
            throw invalid_parameter("point dimension must be at least 1");
    }

    void add(std::span<const double> point, double weight) {
        if (static_cast<int>(point.size()) != dim_)
            throw invalid_input("point dimension mismatch");
        if (!std::isfinite(weight) || weight < 0)
            throw invalid_input("weights must be finite and nonnegative");
        for (double c : point)
            if (!std::isfinite(c))
                throw invalid_input("point coordinates must be finite");
        coords_.insert(coords_.end(), point.begin(), point.end());
        weights_.push_back(weight);
    }

    int dim() const { return dim_; }
    std::size_t size() const { return weights_.size(); }

    const double* point(std::size_t j) const {
        return coords_.data() + j * static_cast<std::size_t>(dim_);
    }
    double weight(std::size_t j) const { return weights_[j]; }

private:
    int dim_;
    std::vector<double> coords_;
    std::vector<double> weights_;
};

enum class MedianAlgorithm { weiszfeld, irls_regularized };

struct MedianSolverConfig {
    MedianAlgorithm algorithm = MedianAlgorithm::irls_regularized;
    double snap_epsilon = 1e-6;  // weiszfeld: proximity at which an iterate snaps to a point
    double bias_initial = 1.0;   // irls: starting bias epsilon_0
    double bias_shrink = 0.1;    // irls: geometric shrink factor per iteration
    double step_tolerance = 1e-6;
    int max_iterations = 20;
};

// Smallest bias the regularized IRLS schedule shrinks to.
inline constexpr double kMedianBiasFloor = 1e-8;

struct MedianResult {
    std::vector<double> point;
    int iterations = 0;
    double final_cost = 0.0;
    bool converged = false;
};

// Optional per-iteration record, for diagnostics and tests.
struct MedianTrace {
    std::vector<std::vector<double>> iterates;  // starts with the initial weighted mean
    std::vector<double> costs;
    std::vector<bool> snapped;  // iterate was produced by the snap rule
};

namespace detail {

inline void validate_median_config(const MedianSolverConfig& cfg) {
    if (cfg.step_tolerance <= 0)
        throw invalid_parameter("step_tolerance must be positive");
    if (cfg.max_iterations < 1)
        throw invalid_parameter("max_iterations must be at least 1");
    if (cfg.snap_epsilon <= 0)
        throw invalid_parameter("snap_epsilon must be positive");
    if (cfg.bias_initial <= 0)
        throw invalid_parameter("bias_initial must be positive");
    if (cfg.bias_shrink <= 0 || cfg.bias_shrink >= 1)
        throw invalid_parameter("bias_shrink must be in (0,1)");
}

inline double distance(const double* a, const double* b, int dim) {
    double s = 0;
    for (int c = 0; c < dim; ++c) {
        const double d = a[c] - b[c];
        s += d * d;
    }
    return std::sqrt(s);
}

template <class View>
double view_cost(const View& v, const double* x) {
    const int dim = v.dimension();
    double cost = 0;
    for (std::size_t j = 0; j < v.size(); ++j)
        cost += v.weight(j) * distance(x, v.point(j), dim);
    return cost;
}

template <class View>
double view_weight_sum(const View& v) {
    double s = 0;
    for (std::size_t j = 0; j < v.size(); ++j) {
        const double w = v.weight(j);
        if (!std::isfinite(w) || w < 0)
            throw invalid_input("weights must be finite and nonnegative");
        s += w;
    }
    return s;
}

// x := sum_j mu_j p_j / sum_j mu_j
template <class View>
void weighted_combination(const View& v, const std::vector<double>& mu, double mu_sum,
                          std::vector<double>& x) {
    const int dim = v.dimension();
    std::fill(x.begin(), x.end(), 0.0);
    for (std::size_t j = 0; j < v.size(); ++j) {
        const double m = mu[j];
        if (m == 0) continue;
        const double* p = v.point(j);
        for (int c = 0; c < dim; ++c)
            x[static_cast<std::size_t>(c)] += m * p[c];
    }
    for (int c = 0; c < dim; ++c)
        x[static_cast<std::size_t>(c)] /= mu_sum;
}

// Clamp to the per-coordinate bounding box of the points. A convex
// combination stays inside in exact arithmetic; this removes the last-ulp
// excursions floating point can introduce.
inline void clamp_to_box(std::vector<double>& x, const std::vector<double>& lo,
                         const std::vector<double>& hi) {
    for (std::size_t c = 0; c < x.size(); ++c)
        x[c] = std::clamp(x[c], lo[c], hi[c]);
}

// Weighted geometric median of a point view. The view needs:
//   size(), dimension(), point(j) -> const double*, weight(j) -> double.
template <class View>
MedianResult solve_median(const View& v, const MedianSolverConfig& cfg,
                          MedianTrace* trace = nullptr) {
    validate_median_config(cfg);
    const std::size_t n = v.size();
    const int dim = v.dimension();
    if (n == 0)
        throw degenerate_weights("empty point set");

    const double weight_sum = view_weight_sum(v);
    if (weight_sum <= 0)
        throw degenerate_weights("all weights are zero");

    MedianResult result;

    // Per-coordinate hull box.
    std::vector<double> lo(v.point(0), v.point(0) + dim);
    std::vector<double> hi = lo;
    for (std::size_t j = 1; j < n; ++j) {
        const double* p = v.point(j);
        for (int c = 0; c < dim; ++c) {
            lo[static_cast<std::size_t>(c)] = std::min(lo[static_cast<std::size_t>(c)], p[c]);
            hi[static_cast<std::size_t>(c)] = std::max(hi[static_cast<std::size_t>(c)], p[c]);
        }
    }

    // Majority weight: if one point carries more than half the total weight,
    // it is the median outright.
    std::size_t heaviest = 0;
    for (std::size_t j = 1; j < n; ++j)
        if (v.weight(j) > v.weight(heaviest)) heaviest = j;
    if (v.weight(heaviest) > weight_sum - v.weight(heaviest)) {
        result.point.assign(v.point(heaviest), v.point(heaviest) + dim);
        result.converged = true;
        result.final_cost = view_cost(v, result.point.data());
        if (trace) {
            trace->iterates.push_back(result.point);
            trace->costs.push_back(result.final_cost);
            trace->snapped.push_back(false);
        }
        return result;
    }

    // Start at the weighted mean.
    std::vector<double> x(static_cast<std::size_t>(dim));
    std::vector<double> mu(n);
    for (std::size_t j = 0; j < n; ++j)
        mu[j] = v.weight(j);
    weighted_combination(v, mu, weight_sum, x);
    clamp_to_box(x, lo, hi);

    auto record = [&](const std::vector<double>& point, bool snapped) {
        if (!trace) return;
        trace->iterates.push_back(point);
        trace->costs.push_back(view_cost(v, point.data()));
        trace->snapped.push_back(snapped);
    };
    record(x, false);

    std::vector<double> dist(n);
    std::vector<double> next(static_cast<std::size_t>(dim));
    double bias = cfg.bias_initial;
    const bool weiszfeld = cfg.algorithm == MedianAlgorithm::weiszfeld;

    for (int iter = 1; iter <= cfg.max_iterations; ++iter) {
        bool snapped = false;
        if (weiszfeld) {
            for (std::size_t j = 0; j < n; ++j)
                dist[j] = distance(x.data(), v.point(j), dim);
            std::size_t nearest = 0;
            for (std::size_t j = 1; j < n; ++j)
                if (dist[j] < dist[nearest]) nearest = j;

            if (dist[nearest] < cfg.snap_epsilon) {
                // Snap to the data point, then test its optimality via the
                // subgradient condition. Points within snap_epsilon of the
                // anchor fold into its weight.
                snapped = true;
                std::copy(v.point(nearest), v.point(nearest) + dim, x.begin());
                for (std::size_t j = 0; j < n; ++j)
                    dist[j] = distance(x.data(), v.point(j), dim);

                std::vector<double> residual(static_cast<std::size_t>(dim), 0.0);
                double anchor_weight = 0;
                double lipschitz = 0;
                for (std::size_t j = 0; j < n; ++j) {
                    if (dist[j] < cfg.snap_epsilon) {
                        anchor_weight += v.weight(j);
                        continue;
                    }
                    const double c = v.weight(j) / dist[j];
                    lipschitz += c;
                    const double* p = v.point(j);
                    for (int k = 0; k < dim; ++k)
                        residual[static_cast<std::size_t>(k)] += c * (x[static_cast<std::size_t>(k)] - p[k]);
                }
                double residual_norm = 0;
                for (double r : residual)
                    residual_norm += r * r;
                residual_norm = std::sqrt(residual_norm);

                if (residual_norm <= anchor_weight) {
                    // The data point is the median.
                    result.point = x;
                    result.iterations = iter;
                    result.converged = true;
                    result.final_cost = view_cost(v, x.data());
                    record(x, true);
                    return result;
                }
                // Leave the anchor along the negative residual, using the
                // step length that guarantees descent.
                const double step = (residual_norm - anchor_weight) / lipschitz;
                for (int k = 0; k < dim; ++k)
                    next[static_cast<std::size_t>(k)] =
                        x[static_cast<std::size_t>(k)] - step * residual[static_cast<std::size_t>(k)] / residual_norm;
                clamp_to_box(next, lo, hi);
            } else {
                double mu_sum = 0;
                for (std::size_t j = 0; j < n; ++j) {
                    mu[j] = v.weight(j) / dist[j];
                    mu_sum += mu[j];
                }
                weighted_combination(v, mu, mu_sum, next);
                clamp_to_box(next, lo, hi);
            }
        } else {
            // Regularized IRLS: mu_j = w_j / (||x - x_j||^2 + bias^2)^(1/2),
            // with the bias shrunk geometrically each iteration. Distance
            // and accumulation run in one pass over the points.
            double mu_sum = 0;
            std::fill(next.begin(), next.end(), 0.0);
            const double bias_sq = bias * bias;
            for (std::size_t j = 0; j < n; ++j) {
                const double* p = v.point(j);
                double d_sq = 0;
                for (int c = 0; c < dim; ++c) {
                    const double d = x[static_cast<std::size_t>(c)] - p[c];
                    d_sq += d * d;
                }
                const double m = v.weight(j) / std::sqrt(d_sq + bias_sq);
                mu_sum += m;
                for (int c = 0; c < dim; ++c)
                    next[static_cast<std::size_t>(c)] += m * p[c];
            }
            for (int c = 0; c < dim; ++c)
                next[static_cast<std::size_t>(c)] /= mu_sum;
            clamp_to_box(next, lo, hi);
            bias = std::max(bias * cfg.bias_shrink, kMedianBiasFloor);
        }

        double step_norm = 0;
        double x_norm = 0;
        for (int c = 0; c < dim; ++c) {
            const double d = next[static_cast<std::size_t>(c)] - x[static_cast<std::size_t>(c)];
            step_norm += d * d;
            x_norm += x[static_cast<std::size_t>(c)] * x[static_cast<std::size_t>(c)];
        }
        step_norm = std::sqrt(step_norm);
        x_norm = std::sqrt(x_norm);

        x = next;
        record(x, snapped);
        result.iterations = iter;
        if (step_norm <= cfg.step_tolerance * (1.0 + x_norm)) {
            result.converged = true;
            break;
        }
    }

    result.point = x;
    result.final_cost = view_cost(v, x.data());
    return result;
}

struct PointSetView {
    const WeightedPointSet* ps;
    std::size_t size() const { return ps->size(); }
    int dimension() const { return ps->dim(); }
    const double* point(std::size_t j) const { return ps->point(j); }
    double weight(std::size_t j) const { return ps->weight(j); }
};

} // namespace detail

// sum_j w_j x_j / sum_j w_j
inline std::vector<double> weighted_mean(const WeightedPointSet& ps) {
    if (ps.size() == 0)
        throw degenerate_weights("empty point set");
    const detail::PointSetView view{&ps};
    const double weight_sum = detail::view_weight_sum(view);
    if (weight_sum <= 0)
        throw degenerate_weights("all weights are zero");
    std::vector<double> mean(static_cast<std::size_t>(ps.dim()), 0.0);
    for (std::size_t j = 0; j < ps.size(); ++j) {
        const double w = ps.weight(j);
        const double* p = ps.point(j);
        for (int c = 0; c < ps.dim(); ++c)
            mean[static_cast<std::size_t>(c)] += w * p[c];
    }
    for (double& c : mean)
        c /= weight_sum;
    return mean;
}

// sum_j w_j ||x - x_j||
inline double median_cost(const WeightedPointSet& ps, std::span<const double> x) {
    if (static_cast<int>(x.size()) != ps.dim())
        throw invalid_input("query point dimension mismatch");
    for (double c : x)
        if (!std::isfinite(c))
            throw invalid_input("query point coordinates must be finite");
    return detail::view_cost(detail::PointSetView{&ps}, x.data());
}

// Approximate minimizer of sum_j w_j ||x - x_j||, starting from the weighted
// mean. Weiszfeld iterations snap to a data point when an iterate comes
// within snap_epsilon of it; regularized IRLS instead biases the reweighting
// denominators and shrinks the bias geometrically. Iterations stop when
// ||x_next - x|| <= step_tolerance * (1 + ||x||) or at max_iterations.
inline MedianResult euclidean_median(const WeightedPointSet& ps,
                                     const MedianSolverConfig& cfg = {},
                                     MedianTrace* trace = nullptr) {
    return detail::solve_median(detail::PointSetView{&ps}, cfg, trace);
}

} // namespace nlem
