#pragma once

#include <span>
#include <vector>

namespace sketchbench {

struct ProjectionParams {
    double lambda = 10.0;           // L1 ball radius, > 0 (may be +inf)
    double epsilon = 0.1;           // band tolerance, >= 0
    int max_bisection_iters = 100;
};

// Approximate projection onto the L1 ball of radius lambda: bisection finds a
// threshold theta with soft-thresholded L1 norm inside [lambda,
// lambda*(1+epsilon)], then applies sign(c_i) * max(0, |c_i| - theta).
// Vectors already inside the relaxed ball are returned unchanged. If the
// bisection fails to land in the band within max_bisection_iters the exact
// projection is used instead.
std::vector<double> epsilon_l1_project(std::span<const double> c,
                                       const ProjectionParams& params);

// Exact Euclidean projection onto {v : ||v||_1 <= lambda}, sort-and-threshold.
std::vector<double> exact_l1_project(std::span<const double> c, double lambda);

} // namespace sketchbench
