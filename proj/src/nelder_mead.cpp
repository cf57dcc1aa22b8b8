#include "seirv/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "seirv/error.hpp"

namespace seirv {

void NelderMeadConfig::validate() const {
    if (!(alpha > 0.0)) throw ValidationError("Nelder-Mead reflection must be > 0");
    if (!(gamma > 1.0)) throw ValidationError("Nelder-Mead expansion must be > 1");
    if (!(rho > 0.0 && rho < 1.0)) throw ValidationError("Nelder-Mead contraction must lie in (0,1)");
    if (!(sigma > 0.0 && sigma < 1.0)) throw ValidationError("Nelder-Mead shrink must lie in (0,1)");
    if (!(tol_f >= 0.0) || !(tol_x >= 0.0)) throw ValidationError("Nelder-Mead tolerances must be >= 0");
    if (max_iter < 1) throw ValidationError("Nelder-Mead max_iter must be >= 1");
    if (!(initial_spread > 0.0)) throw ValidationError("Nelder-Mead initial spread must be > 0");
}

Box Box::unbounded(Eigen::Index n) {
    const double inf = std::numeric_limits<double>::infinity();
    return {Eigen::VectorXd::Constant(n, -inf), Eigen::VectorXd::Constant(n, inf)};
}

namespace {

struct Vertex {
    Eigen::VectorXd x;
    double f;
};

double rank_value(double v) { return std::isfinite(v) ? v : std::numeric_limits<double>::infinity(); }

}  // namespace

NelderMeadResult nelder_mead(const Objective& f, const Eigen::VectorXd& start, const Box& bounds,
                             const NelderMeadConfig& cfg) {
    cfg.validate();
    const Eigen::Index n = start.size();
    if (n < 1) throw ValidationError("Nelder-Mead needs at least one parameter");
    if (bounds.lower.size() != n || bounds.upper.size() != n || (bounds.lower.array() > bounds.upper.array()).any())
        throw ValidationError("Nelder-Mead bounds do not match the start vector");
    if (!start.allFinite() || !bounds.contains(start)) throw ValidationError("Nelder-Mead start lies outside the bounds");

    NelderMeadResult res;
    auto eval = [&](const Eigen::VectorXd& x) {
        ++res.evaluations;
        return rank_value(f(x));
    };

    std::vector<Vertex> s;
    s.push_back({start, eval(start)});
    for (Eigen::Index j = 0; j < n; ++j) {
        Eigen::VectorXd x = start;
        const double step = start(j) != 0.0 ? cfg.initial_spread * std::abs(start(j)) : cfg.initial_spread;
        x(j) += step;
        if (x(j) > bounds.upper(j)) x(j) = start(j) - step;
        x = bounds.project(x);
        s.push_back({x, eval(x)});
    }
    if (std::none_of(s.begin(), s.end(), [](const Vertex& v) { return std::isfinite(v.f); }))
        throw NumericalError("Nelder-Mead: objective is not finite at any simplex vertex");

    auto by_value = [](const Vertex& a, const Vertex& b) { return a.f < b.f; };
    std::stable_sort(s.begin(), s.end(), by_value);

    const auto last = static_cast<std::size_t>(n);
    for (res.iterations = 0; res.iterations < cfg.max_iter; ++res.iterations) {
        double diameter = 0.0;
        for (std::size_t i = 1; i <= last; ++i) diameter = std::max(diameter, (s[i].x - s[0].x).cwiseAbs().maxCoeff());
        const double spread = s[last].f - s[0].f;
        if (diameter <= cfg.tol_x && spread <= cfg.tol_f * std::max(1.0, std::abs(s[0].f))) {
            res.converged = true;
            break;
        }

        Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
        for (std::size_t i = 0; i < last; ++i) centroid += s[i].x;
        centroid /= static_cast<double>(n);
        Vertex& worst = s[last];

        const Eigen::VectorXd xr = bounds.project(reflect(centroid, worst.x, cfg.alpha));
        const double fr = eval(xr);
        bool shrink = false;
        if (fr < s[0].f) {
            const Eigen::VectorXd xe = bounds.project(centroid + cfg.gamma * (xr - centroid));
            const double fe = eval(xe);
            worst = fe < fr ? Vertex{xe, fe} : Vertex{xr, fr};
        } else if (fr < s[last - 1].f) {
            worst = {xr, fr};
        } else if (fr < worst.f) {
            const Eigen::VectorXd xc = bounds.project(centroid + cfg.rho * (xr - centroid));
            const double fc = eval(xc);
            if (fc <= fr)
                worst = {xc, fc};
            else
                shrink = true;
        } else {
            const Eigen::VectorXd xc = bounds.project(centroid + cfg.rho * (worst.x - centroid));
            const double fc = eval(xc);
            if (fc < worst.f)
                worst = {xc, fc};
            else
                shrink = true;
        }
        if (shrink) {
            for (std::size_t i = 1; i <= last; ++i) {
                s[i].x = s[0].x + cfg.sigma * (s[i].x - s[0].x);
                s[i].f = eval(s[i].x);
            }
        }
        std::stable_sort(s.begin(), s.end(), by_value);
    }

    res.argmin = s[0].x;
    res.min_value = s[0].f;
    return res;
}

}  // namespace seirv
