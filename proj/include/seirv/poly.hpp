#pragma once

#include <array>
#include <complex>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>

namespace seirv {

/// Characteristic polynomial det(lambda I - A) as sums of principal minors of -A.
/// Returns c with c(0) = 1 and p(lambda) = sum_k c(k) lambda^(n-k).
///
/// Each minor is a pivoted LU determinant. The trace recursion of Faddeev-LeVerrier is shorter
/// but loses every digit of the constant term once the entries span several decades, which is
/// the normal case for endemic Jacobians.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> characteristic_polynomial(
    const Eigen::MatrixBase<Derived>& a) {
    using Scalar = typename Derived::Scalar;
    using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    const Eigen::Index n = a.rows();
    eigen_assert(a.cols() == n && n < 16);

    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> c = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Zero(n + 1);
    c(0) = Scalar(1);
    std::vector<Eigen::Index> idx;
    for (unsigned mask = 1; mask < (1u << n); ++mask) {
        idx.clear();
        for (Eigen::Index i = 0; i < n; ++i)
            if (mask >> i & 1u) idx.push_back(i);
        const auto k = static_cast<Eigen::Index>(idx.size());
        Mat sub(k, k);
        for (Eigen::Index i = 0; i < k; ++i)
            for (Eigen::Index j = 0; j < k; ++j) sub(i, j) = -a(idx[i], idx[j]);
        c(k) += Eigen::FullPivLU<Mat>(sub).determinant();
    }
    return c;
}

/// Horner evaluation of a polynomial in the same coefficient layout.
template <typename Derived, typename T>
T polynomial_eval(const Eigen::MatrixBase<Derived>& c, T x) {
    T acc = T(c(0));
    for (Eigen::Index k = 1; k < c.size(); ++k) acc = acc * x + T(c(k));
    return acc;
}

/// Roots of a monic polynomial from the companion matrix, polished by a few Newton steps.
inline Eigen::VectorXcd polynomial_roots(const Eigen::VectorXd& c) {
    const Eigen::Index n = c.size() - 1;
    if (n < 1) return {};
    Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index k = 0; k < n; ++k) comp(0, k) = -c(k + 1) / c(0);
    for (Eigen::Index k = 1; k < n; ++k) comp(k, k - 1) = 1.0;
    Eigen::VectorXcd roots = Eigen::EigenSolver<Eigen::MatrixXd>(comp, false).eigenvalues();

    Eigen::VectorXd dc(n);
    for (Eigen::Index k = 0; k < n; ++k) dc(k) = c(k) * static_cast<double>(n - k);
    for (auto& z : roots) {
        for (int it = 0; it < 3; ++it) {
            const std::complex<double> d = polynomial_eval(dc, z);
            if (std::abs(d) == 0.0) break;
            const std::complex<double> next = z - polynomial_eval(c, z) / d;
            if (std::abs(polynomial_eval(c, next)) >= std::abs(polynomial_eval(c, z))) break;
            z = next;
        }
    }
    return roots;
}

/// Routh-Hurwitz tests for lambda^5 + h1 lambda^4 + h2 lambda^3 + h3 lambda^2 + h4 lambda + h5:
/// positivity, h1h2 - h3, h1h4 - h5, the third Hurwitz minor, and h1 times the fourth minor.
inline std::array<bool, 5> routh_hurwitz_quintic(const Eigen::Matrix<double, 5, 1>& h) {
    const double h1 = h(0), h2 = h(1), h3 = h(2), h4 = h(3), h5 = h(4);
    const double a = h1 * h2 - h3;
    const double b = h1 * h4 - h5;
    const double d3 = a * h3 - h1 * b;
    return {(h.array() > 0.0).all(), a > 0.0, b > 0.0, d3 > 0.0, d3 * b - h5 * a * a > 0.0};
}

}  // namespace seirv
