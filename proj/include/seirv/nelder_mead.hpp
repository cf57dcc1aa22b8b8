#pragma once

#include <functional>

#include <Eigen/Core>

namespace seirv {

struct NelderMeadConfig {
    double alpha = 1.0;   ///< reflection
    double gamma = 2.0;   ///< expansion
    double rho = 0.5;     ///< contraction
    double sigma = 0.5;   ///< shrink
    double tol_f = 1e-8;  ///< f spread, relative to max(1, |f_best|)
    double tol_x = 1e-8;  ///< simplex diameter (max norm)
    int max_iter = 2000;
    double initial_spread = 0.05;  ///< vertex offset as a fraction of |x_j| (absolute when x_j = 0)

    void validate() const;
};

struct Box {
    Eigen::VectorXd lower;
    Eigen::VectorXd upper;

    static Box unbounded(Eigen::Index n);
    Eigen::VectorXd project(const Eigen::VectorXd& x) const { return x.cwiseMax(lower).cwiseMin(upper); }
    bool contains(const Eigen::VectorXd& x) const {
        return (x.array() >= lower.array()).all() && (x.array() <= upper.array()).all();
    }
};

struct NelderMeadResult {
    Eigen::VectorXd argmin;
    double min_value = 0.0;
    int iterations = 0;
    int evaluations = 0;
    bool converged = false;
};

using Objective = std::function<double(const Eigen::VectorXd&)>;

/// theta_c + alpha (theta_c - theta_h)
inline Eigen::VectorXd reflect(const Eigen::VectorXd& centroid, const Eigen::VectorXd& worst, double alpha) {
    return centroid + alpha * (centroid - worst);
}

/// Bounded Nelder-Mead. Candidate points are projected onto the box; non-finite objective
/// values rank last. Stops once both the simplex diameter and the f spread fall under their
/// tolerances, or after max_iter iterations.
NelderMeadResult nelder_mead(const Objective& f, const Eigen::VectorXd& start, const Box& bounds,
                             const NelderMeadConfig& cfg = {});

}  // namespace seirv
