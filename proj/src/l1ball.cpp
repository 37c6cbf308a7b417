#include "sketchbench/l1ball.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sketchbench/error.hpp"

namespace sketchbench {

namespace {

double l1_norm(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += std::abs(x);
    return s;
}

double linf_norm(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s = std::max(s, std::abs(x));
    return s;
}

double soft_threshold_norm(std::span<const double> v, double theta) {
    double s = 0.0;
    for (double x : v) s += std::max(0.0, std::abs(x) - theta);
    return s;
}

std::vector<double> apply_soft_threshold(std::span<const double> v,
                                         double theta) {
    std::vector<double> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double mag = std::abs(v[i]) - theta;
        out[i] = mag > 0.0 ? std::copysign(mag, v[i]) : 0.0;
    }
    return out;
}

void check_inputs(std::span<const double> c, double lambda) {
    require(lambda > 0.0, ErrorKind::invalid_argument,
            "L1 radius must be positive");
    for (double x : c)
        require(std::isfinite(x), ErrorKind::invalid_argument,
                "projection input must be finite");
}

} // namespace

std::vector<double> epsilon_l1_project(std::span<const double> c,
                                       const ProjectionParams& params) {
    check_inputs(c, params.lambda);
    require(params.epsilon >= 0.0, ErrorKind::invalid_argument,
            "epsilon must be non-negative");

    const double lambda = params.lambda;
    const double upper = lambda * (1.0 + params.epsilon);
    double norm = l1_norm(c);
    if (norm <= upper) return {c.begin(), c.end()};

    // With epsilon = 0 the band has zero width, so accept r within a small
    // absolute tolerance of lambda instead of bisecting forever.
    const double zero_band_tol = 1e-10 * std::max(1.0, lambda);

    double lo = 0.0;
    double hi = linf_norm(c);
    double theta = 0.0;
    double r = norm;
    bool in_band = false;
    for (int iter = 0; iter < params.max_bisection_iters; ++iter) {
        if ((r >= lambda && r <= upper) ||
            (params.epsilon == 0.0 && std::abs(r - lambda) <= zero_band_tol)) {
            in_band = true;
            break;
        }
        theta = 0.5 * (lo + hi);
        r = soft_threshold_norm(c, theta);
        if (r < lambda)
            hi = theta;
        else
            lo = theta;
    }
    if (!in_band) return exact_l1_project(c, lambda);
    return apply_soft_threshold(c, theta);
}

std::vector<double> exact_l1_project(std::span<const double> c, double lambda) {
    check_inputs(c, lambda);
    if (l1_norm(c) <= lambda) return {c.begin(), c.end()};

    std::vector<double> mags(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) mags[i] = std::abs(c[i]);
    std::sort(mags.begin(), mags.end(), std::greater<>());

    double cumulative = 0.0;
    double theta = 0.0;
    for (std::size_t k = 0; k < mags.size(); ++k) {
        cumulative += mags[k];
        const double candidate =
            (cumulative - lambda) / static_cast<double>(k + 1);
        if (k + 1 == mags.size() || mags[k + 1] <= candidate) {
            theta = candidate;
            break;
        }
    }
    return apply_soft_threshold(c, theta);
}

} // namespace sketchbench
