// conelp - conic linear programming sensitivity toolkit
// Licensed under Apache 2.0

#ifndef CONELP_DETAIL_NNLS_HPP
#define CONELP_DETAIL_NNLS_HPP

#include <Eigen/Dense>
#include <vector>

namespace conelp::detail {

// Lawson-Hanson active-set method for  min_{lambda >= 0} || G lambda - y ||_2.
// Returns the minimizer; deterministic (largest-gradient pivot, first index
// wins ties).  Used for membership tests of finitely generated cones.
inline Eigen::VectorXd nnls(const Eigen::MatrixXd& G, const Eigen::VectorXd& y) {
    const int k = static_cast<int>(G.cols());
    Eigen::VectorXd lambda = Eigen::VectorXd::Zero(k);
    std::vector<bool> passive(k, false);
    Eigen::VectorXd resid = y;
    const double tol = 1e-12 * (1.0 + y.norm()) * (1.0 + G.norm());

    auto solve_passive = [&](const std::vector<bool>& act) {
        std::vector<int> idx;
        for (int j = 0; j < k; ++j)
            if (act[j]) idx.push_back(j);
        Eigen::VectorXd z = Eigen::VectorXd::Zero(k);
        if (idx.empty()) return z;
        Eigen::MatrixXd Gp(G.rows(), idx.size());
        for (size_t j = 0; j < idx.size(); ++j) Gp.col(j) = G.col(idx[j]);
        Eigen::VectorXd zp = Gp.colPivHouseholderQr().solve(y);
        for (size_t j = 0; j < idx.size(); ++j) z(idx[j]) = zp(j);
        return z;
    };

    for (int outer = 0; outer < 3 * k + 10; ++outer) {
        Eigen::VectorXd grad = G.transpose() * resid;
        int best = -1;
        double best_g = tol;
        for (int j = 0; j < k; ++j)
            if (!passive[j] && grad(j) > best_g) {
                best_g = grad(j);
                best = j;
            }
        if (best < 0) break;
        passive[best] = true;

        Eigen::VectorXd z = solve_passive(passive);
        int inner = 0;
        while (inner++ < 3 * k + 10) {
            bool all_pos = true;
            for (int j = 0; j < k; ++j)
                if (passive[j] && z(j) <= 0) all_pos = false;
            if (all_pos) break;
            double alpha = 1.0;
            for (int j = 0; j < k; ++j)
                if (passive[j] && z(j) <= 0 && lambda(j) - z(j) > 0)
                    alpha = std::min(alpha, lambda(j) / (lambda(j) - z(j)));
            lambda += alpha * (z - lambda);
            for (int j = 0; j < k; ++j)
                if (passive[j] && lambda(j) <= tol) {
                    passive[j] = false;
                    lambda(j) = 0.0;
                }
            z = solve_passive(passive);
        }
        lambda = z;
        resid = y - G * lambda;
    }
    return lambda.cwiseMax(0.0);
}

} // namespace conelp::detail

#endif
