// conelp - conic linear programming sensitivity toolkit
// Licensed under Apache 2.0

#ifndef CONELP_IPM_HPP
#define CONELP_IPM_HPP

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <cstdio>
#include <vector>

#include "conelp/errors.hpp"

// Homogeneous self-dual embedding path-following interior-point method for
//
//     minimize    c'x   subject to   A x - b in K,   x free,
//
// where K is a product of nonnegative-orthant and second-order blocks.
// Second-order blocks use the norm-last layout: (u_1..u_{p-1}, u_p) is in
// the cone iff u_p >= ||u_1..u_{p-1}||_2.  The embedding produces either an
// optimal primal/dual pair, a primal infeasibility certificate
// (y in K*, A'y = 0, b'y > 0) or an unboundedness ray (A x in K, c'x < 0).

namespace conelp::ipm {

using Eigen::MatrixXd;
using Eigen::VectorXd;

struct BlockSpec {
    enum class Kind { Orthant, Soc };
    Kind kind = Kind::Orthant;
    int dim = 0;
};
using BlockList = std::vector<BlockSpec>;

struct Options {
    double tol_feas = 1e-8;
    double tol_gap = 1e-8;
    double tol_inf = 1e-8;  // certificate quality threshold
    int max_iter = 200;
    double frac_to_boundary = 0.99;
    double reg = 1e-13;  // static KKT regularization
    bool verbose = false;
};

enum class Status { Optimal, PrimalInfeasible, DualInfeasible, Indeterminate };

struct Result {
    Status status = Status::Indeterminate;
    VectorXd x, y, s;  // de-homogenized iterate (x/tau, y/tau, s/tau)
    double primal_obj = std::numeric_limits<double>::quiet_NaN();
    double dual_obj = std::numeric_limits<double>::quiet_NaN();
    double rel_pres = std::numeric_limits<double>::infinity();
    double rel_dres = std::numeric_limits<double>::infinity();
    double rel_gap = std::numeric_limits<double>::infinity();
    VectorXd cert_y;  // primal infeasibility certificate, scaled so b'y = 1
    VectorXd cert_x;  // unboundedness ray, scaled so c'x = -1
    int iterations = 0;
    bool value_stabilized = false;
    double stabilized_value = 0.0;
    double iterate_inf_norm = 0.0;
    std::string note;
};

namespace detail {

inline int total_dim(const BlockList& blocks) {
    int m = 0;
    for (const auto& b : blocks) m += b.dim;
    return m;
}

// Barrier degree: orthant coordinates count 1 each, second-order blocks 2.
inline double cone_degree(const BlockList& blocks) {
    double d = 0;
    for (const auto& b : blocks) d += (b.kind == BlockSpec::Kind::Orthant) ? b.dim : 2;
    return d;
}

inline VectorXd cone_identity(const BlockList& blocks) {
    VectorXd e = VectorXd::Zero(total_dim(blocks));
    int off = 0;
    for (const auto& b : blocks) {
        if (b.kind == BlockSpec::Kind::Orthant)
            e.segment(off, b.dim).setOnes();
        else
            e(off + b.dim - 1) = 1.0;
        off += b.dim;
    }
    return e;
}

// Smallest slack over all blocks; > 0 means strictly interior.
inline double cone_margin(const BlockList& blocks, const VectorXd& v) {
    double margin = std::numeric_limits<double>::infinity();
    int off = 0;
    for (const auto& b : blocks) {
        if (b.kind == BlockSpec::Kind::Orthant) {
            for (int i = 0; i < b.dim; ++i) margin = std::min(margin, v(off + i));
        } else {
            const double t = v(off + b.dim - 1);
            const double r = v.segment(off, b.dim - 1).norm();
            margin = std::min(margin, t - r);
        }
        off += b.dim;
    }
    return margin;
}

// det(u) = u_p^2 - ||u_bar||^2 in the factored form (u_p - ||u_bar||) *
// (u_p + ||u_bar||); the naive difference of squares loses all precision
// for the tiny determinants that occur near convergence at large iterate
// scales.
inline double soc_det(const Eigen::Ref<const VectorXd>& u) {
    const int p = static_cast<int>(u.size());
    const double r = u.head(p - 1).norm();
    return (u(p - 1) - r) * (u(p - 1) + r);
}

// sup { alpha >= 0 : v + alpha dv in K }, assuming v strictly interior.
inline double max_step(const BlockList& blocks, const VectorXd& v, const VectorXd& dv) {
    const double INF = std::numeric_limits<double>::infinity();
    double step = INF;
    int off = 0;
    for (const auto& b : blocks) {
        if (b.kind == BlockSpec::Kind::Orthant) {
            for (int i = 0; i < b.dim; ++i)
                if (dv(off + i) < 0) step = std::min(step, -v(off + i) / dv(off + i));
        } else {
            // the boundary is det(v + alpha dv) = 0; the middle coordinate
            // cannot hit zero while det stays positive, so the smallest
            // positive root of the det quadratic is the exit point
            const auto vb = v.segment(off, b.dim);
            const auto db = dv.segment(off, b.dim);
            const double c0 = soc_det(vb);
            const double a = soc_det(db);
            const double bq = vb(b.dim - 1) * db(b.dim - 1) - vb.head(b.dim - 1).dot(db.head(b.dim - 1));
            const double scale = std::abs(a) + std::abs(bq) + std::abs(c0);
            if (std::abs(a) <= 1e-14 * scale) {
                if (bq < 0) step = std::min(step, -c0 / (2.0 * bq));
            } else {
                const double disc = bq * bq - a * c0;
                if (a < 0) {
                    // exactly one positive root
                    const double sq = std::sqrt(std::max(disc, 0.0));
                    const double r1 = (-bq + sq) / a;
                    const double r2 = (-bq - sq) / a;
                    double r = INF;
                    if (r1 > 0) r = std::min(r, r1);
                    if (r2 > 0) r = std::min(r, r2);
                    step = std::min(step, r);
                } else if (disc >= 0 && bq < 0) {
                    // both roots positive; take the smaller via the stable form
                    const double sq = std::sqrt(disc);
                    const double r = c0 / (-bq + sq);  // == (-bq - sq)/a * a.. smaller root
                    if (r > 0) step = std::min(step, r);
                }
            }
        }
        off += b.dim;
    }
    return step;
}

inline VectorXd jordan_prod(const BlockList& blocks, const VectorXd& u, const VectorXd& v) {
    VectorXd r(u.size());
    int off = 0;
    for (const auto& b : blocks) {
        if (b.kind == BlockSpec::Kind::Orthant) {
            r.segment(off, b.dim) = u.segment(off, b.dim).cwiseProduct(v.segment(off, b.dim));
        } else {
            const int p = b.dim;
            const auto ub = u.segment(off, p), vb = v.segment(off, p);
            r.segment(off, p - 1) = ub(p - 1) * vb.head(p - 1) + vb(p - 1) * ub.head(p - 1);
            r(off + p - 1) = ub.dot(vb);
        }
        off += b.dim;
    }
    return r;
}

// Solve lambda o x = d blockwise (arrow system for second-order blocks).
inline VectorXd jordan_div(const BlockList& blocks, const VectorXd& lambda, const VectorXd& d) {
    VectorXd x(d.size());
    int off = 0;
    for (const auto& b : blocks) {
        if (b.kind == BlockSpec::Kind::Orthant) {
            x.segment(off, b.dim) = d.segment(off, b.dim).cwiseQuotient(lambda.segment(off, b.dim));
        } else {
            const int p = b.dim;
            const auto lb = lambda.segment(off, p), db = d.segment(off, p);
            const double det = soc_det(lb);
            const double lp = lb(p - 1);
            const double xp = (lp * db(p - 1) - lb.head(p - 1).dot(db.head(p - 1))) / det;
            x.segment(off, p - 1) = (db.head(p - 1) - xp * lb.head(p - 1)) / lp;
            x(off + p - 1) = xp;
        }
        off += b.dim;
    }
    return x;
}

// Nesterov-Todd scaling.  For each block, W is the symmetric matrix with
// W y = W^{-1} s =: lambda.  Second-order blocks use the quadratic
// representation of the square root of the scaling point w, where
// w = eta * (s~ + J y~) / (2 gamma) with J = diag(-I, 1).
struct Scaling {
    // orthant blocks: d = s./y so that W = diag(sqrt(d)), W^2 = diag(d)
    // second-order blocks: dense W, Winv, W2
    struct Block {
        VectorXd d;
        MatrixXd W, Winv, W2;
    };
    std::vector<Block> blocks;
    VectorXd lambda;

    VectorXd apply_W(const BlockList& bl, const VectorXd& v) const {
        VectorXd r(v.size());
        int off = 0;
        for (size_t k = 0; k < bl.size(); ++k) {
            const int p = bl[k].dim;
            if (bl[k].kind == BlockSpec::Kind::Orthant)
                r.segment(off, p) = blocks[k].d.cwiseSqrt().cwiseProduct(v.segment(off, p));
            else
                r.segment(off, p) = blocks[k].W * v.segment(off, p);
            off += p;
        }
        return r;
    }
    VectorXd apply_Winv(const BlockList& bl, const VectorXd& v) const {
        VectorXd r(v.size());
        int off = 0;
        for (size_t k = 0; k < bl.size(); ++k) {
            const int p = bl[k].dim;
            if (bl[k].kind == BlockSpec::Kind::Orthant)
                r.segment(off, p) = v.segment(off, p).cwiseQuotient(blocks[k].d.cwiseSqrt());
            else
                r.segment(off, p) = blocks[k].Winv * v.segment(off, p);
            off += p;
        }
        return r;
    }
};

inline Scaling compute_scaling(const BlockList& bl, const VectorXd& s, const VectorXd& y) {
    Scaling sc;
    sc.blocks.resize(bl.size());
    sc.lambda.resize(s.size());
    int off = 0;
    for (size_t k = 0; k < bl.size(); ++k) {
        const int p = bl[k].dim;
        if (bl[k].kind == BlockSpec::Kind::Orthant) {
            sc.blocks[k].d = s.segment(off, p).cwiseQuotient(y.segment(off, p));
            sc.lambda.segment(off, p) = s.segment(off, p).cwiseProduct(y.segment(off, p)).cwiseSqrt();
        } else {
            const VectorXd sb = s.segment(off, p);
            const VectorXd yb = y.segment(off, p);
            const double sd = std::sqrt(std::max(soc_det(sb), 1e-300));
            const double yd = std::sqrt(std::max(soc_det(yb), 1e-300));
            const VectorXd st = sb / sd;
            const VectorXd yt = yb / yd;
            VectorXd Jyt = -yt;
            Jyt(p - 1) = yt(p - 1);
            const double gamma = std::sqrt(std::max((1.0 + st.dot(yt)) / 2.0, 1e-300));
            const double eta = std::sqrt(sd / yd);
            const VectorXd w = eta * (st + Jyt) / (2.0 * gamma);  // scaling point, det w = eta^2
            // q = w^{1/2} spectrally; W = 2qq' - det(q) J with det(q) = eta
            const double qp = std::sqrt((w(p - 1) + eta) / 2.0);
            VectorXd q = w / (2.0 * qp);
            q(p - 1) = qp;
            MatrixXd J = -MatrixXd::Identity(p, p);
            J(p - 1, p - 1) = 1.0;
            MatrixXd W = 2.0 * q * q.transpose() - eta * J;
            sc.blocks[k].W = W;
            sc.blocks[k].Winv = (J * W * J) / (eta * eta);
            sc.blocks[k].W2 = 2.0 * w * w.transpose() - (eta * eta) * J;  // = W*W
            sc.lambda.segment(off, p) = W * yb;
        }
        off += p;
    }
    return sc;
}

// Symmetric indefinite KKT system  [ reg I   A' ; A  -W^2 - reg I ],
// solved by dense LU with iterative refinement against the
// unregularized matrix.
class KktSolver {
  public:
    void factor(const MatrixXd& A, const BlockList& bl, const Scaling& sc, double reg) {
        const int n = static_cast<int>(A.cols());
        const int m = static_cast<int>(A.rows());
        M0_.setZero(n + m, n + m);
        M0_.topRightCorner(n, m) = A.transpose();
        M0_.bottomLeftCorner(m, n) = A;
        int off = 0;
        for (size_t k = 0; k < bl.size(); ++k) {
            const int p = bl[k].dim;
            if (bl[k].kind == BlockSpec::Kind::Orthant)
                M0_.block(n + off, n + off, p, p).diagonal() = -sc.blocks[k].d;
            else
                M0_.block(n + off, n + off, p, p) = -sc.blocks[k].W2;
            off += p;
        }
        MatrixXd M = M0_;
        M.topLeftCorner(n, n).diagonal().array() += reg;
        M.bottomRightCorner(m, m).diagonal().array() -= reg;
        lu_.compute(M);
        n_ = n;
        m_ = m;
    }

    // Solve M0 [dx; v] = [r1; r2], refining against the unregularized matrix
    // until the residual stops improving.
    void solve(const VectorXd& r1, const VectorXd& r2, VectorXd& dx, VectorXd& v) const {
        VectorXd rhs(n_ + m_);
        rhs.head(n_) = r1;
        rhs.tail(m_) = r2;
        VectorXd sol = lu_.solve(rhs);
        VectorXd best_sol = sol;
        double best_res = (rhs - M0_ * sol).lpNorm<Eigen::Infinity>();
        const double target = 1e-16 * (1.0 + rhs.lpNorm<Eigen::Infinity>());
        for (int it = 0; it < 8 && best_res > target; ++it) {
            VectorXd res = rhs - M0_ * sol;
            sol += lu_.solve(res);
            const double r = (rhs - M0_ * sol).lpNorm<Eigen::Infinity>();
            if (r < best_res) {
                best_res = r;
                best_sol = sol;
            } else {
                break;
            }
        }
        dx = best_sol.head(n_);
        v = best_sol.tail(m_);
    }

  private:
    MatrixXd M0_;
    Eigen::PartialPivLU<MatrixXd> lu_;
    int n_ = 0, m_ = 0;
};

inline VectorXd shift_into_cone(const BlockList& bl, const VectorXd& v) {
    const double margin = cone_margin(bl, v);
    if (margin > 1e-6 * (1.0 + v.lpNorm<Eigen::Infinity>())) return v;
    return v + (1.0 - margin) * cone_identity(bl);
}

}  // namespace detail

inline Result solve(const MatrixXd& A, const VectorXd& b, const VectorXd& c, const BlockList& blocks,
                    const Options& opts = {}) {
    using namespace detail;
    const int m = static_cast<int>(A.rows());
    const int n = static_cast<int>(A.cols());
    if (b.size() != m || c.size() != n || total_dim(blocks) != m)
        throw DimensionError("ipm::solve: inconsistent dimensions");

    Result res;
    const double nu = cone_degree(blocks) + 1.0;
    const VectorXd e = cone_identity(blocks);
    const double bnorm = b.norm(), cnorm = c.norm();

    // initial point: least-squares primal/dual estimates shifted into the cones
    VectorXd x, y, s;
    {
        Scaling id;
        id.blocks.resize(blocks.size());
        for (size_t k = 0; k < blocks.size(); ++k) {
            const int p = blocks[k].dim;
            if (blocks[k].kind == BlockSpec::Kind::Orthant) {
                id.blocks[k].d = VectorXd::Ones(p);
            } else {
                id.blocks[k].W = MatrixXd::Identity(p, p);
                id.blocks[k].Winv = MatrixXd::Identity(p, p);
                id.blocks[k].W2 = MatrixXd::Identity(p, p);
            }
        }
        KktSolver kkt;
        kkt.factor(A, blocks, id, opts.reg);
        VectorXd xp, vp, xd, vd;
        kkt.solve(VectorXd::Zero(n), b, xp, vp);  // A'v = 0, A x - v = b
        kkt.solve(-c, VectorXd::Zero(m), xd, vd); // A'v = -c
        x = xp;
        s = shift_into_cone(blocks, A * xp - b);
        y = shift_into_cone(blocks, -vd);
    }
    double tau = 1.0, kappa = 1.0;

    const double mu0 = (s.dot(y) + tau * kappa) / nu;

    // best iterate seen so far, by worst-of relative metrics
    double best_score = std::numeric_limits<double>::infinity();
    Result best;

    std::vector<double> recent_pcost;

    KktSolver kkt;
    VectorXd dx2, v2, dx1, v1;
    int iter = 0;
    std::string stop_note;
    for (; iter < opts.max_iter; ++iter) {
        // residuals of the embedding
        const VectorXd r_p = A * x - s - b * tau;
        const VectorXd r_d = -A.transpose() * y + c * tau;
        const double r_g = kappa + c.dot(x) - b.dot(y);
        const double mu = (s.dot(y) + tau * kappa) / nu;

        // de-homogenized convergence metrics
        if (tau > 1e-12 * std::max(1.0, kappa)) {
            const VectorXd nx = x / tau, ny = y / tau, ns = s / tau;
            const double pcost = c.dot(nx), dcost = b.dot(ny);
            const double pres = (A * nx - ns - b).norm() / (1.0 + bnorm);
            const double dres = (A.transpose() * ny - c).norm() / (1.0 + cnorm);
            const double gap = std::abs(pcost - dcost) / (1.0 + std::max(std::abs(pcost), std::abs(dcost)));
            if (opts.verbose)
                std::printf("%3d  pc=%+.12e dc=%+.12e pres=%.2e dres=%.2e gap=%.2e mu=%.2e tau=%.2e kap=%.2e |x|=%.2e\n",
                            iter, pcost, dcost, pres, dres, gap, mu, tau, kappa, nx.lpNorm<Eigen::Infinity>());
            const double score = std::max({pres, dres, gap});
            if (score < best_score) {
                best_score = score;
                best.x = nx;
                best.y = ny;
                best.s = ns;
                best.primal_obj = pcost;
                best.dual_obj = dcost;
                best.rel_pres = pres;
                best.rel_dres = dres;
                best.rel_gap = gap;
            }
            recent_pcost.push_back(pcost);
            if (recent_pcost.size() > 6) recent_pcost.erase(recent_pcost.begin());
            if (pres <= opts.tol_feas && dres <= opts.tol_feas && gap <= opts.tol_gap) {
                res = best;
                res.status = Status::Optimal;
                res.iterations = iter;
                res.iterate_inf_norm = nx.lpNorm<Eigen::Infinity>();
                return res;
            }
        }

        // infeasibility certificates (valid independently of tau)
        {
            const double bty = b.dot(y);
            if (bty > 0) {
                const VectorXd yh = y / bty;
                if ((A.transpose() * yh).lpNorm<Eigen::Infinity>() <= opts.tol_inf * (1.0 + yh.lpNorm<Eigen::Infinity>())) {
                    res.status = Status::PrimalInfeasible;
                    res.cert_y = yh;
                    res.iterations = iter;
                    if (best_score < std::numeric_limits<double>::infinity()) {
                        res.x = best.x; res.y = best.y; res.s = best.s;
                    }
                    return res;
                }
            }
            const double ctx = c.dot(x);
            if (ctx < 0) {
                const VectorXd xh = x / (-ctx);
                const VectorXd Axh = A * xh;
                if (cone_margin(blocks, Axh) >= -opts.tol_inf * (1.0 + Axh.lpNorm<Eigen::Infinity>())) {
                    res.status = Status::DualInfeasible;
                    res.cert_x = xh;
                    res.iterations = iter;
                    return res;
                }
            }
        }

        if (mu <= 1e-18 * (1.0 + mu0)) {
            stop_note = "mu floor";
            break;
        }

        const Scaling sc = compute_scaling(blocks, s, y);
        const VectorXd& lambda = sc.lambda;
        kkt.factor(A, blocks, sc, opts.reg);
        kkt.solve(-c, b, dx2, v2);  // static part, reused by both passes

        const double lk = kappa / tau;
        auto direction = [&](double sigma, const VectorXd& d_s, double d_kt, VectorXd& dxo, VectorXd& dyo,
                             VectorXd& dso, double& dtauo, double& dkappao) {
            const double phi = 1.0 - sigma;
            const VectorXd g = jordan_div(blocks, lambda, d_s);
            const VectorXd Wg = sc.apply_W(blocks, g);
            kkt.solve(-phi * r_d, -phi * r_p + Wg, dx1, v1);
            const double denom = c.dot(dx2) + b.dot(v2) - lk;  // strictly negative
            const double dtau = (-phi * r_g - d_kt / tau - c.dot(dx1) - b.dot(v1)) / denom;
            dxo = dx1 + dtau * dx2;
            const VectorXd v = v1 + dtau * v2;
            dyo = -v;
            dso = Wg - sc.apply_W(blocks, sc.apply_W(blocks, dyo));  // W g - W^2 dy
            dtauo = dtau;
            dkappao = (d_kt - kappa * dtau) / tau;
        };

        // predictor
        VectorXd dxa, dya, dsa;
        double dtaua, dkappaa;
        direction(0.0, -jordan_prod(blocks, lambda, lambda), -tau * kappa, dxa, dya, dsa, dtaua, dkappaa);

        double alpha_aff = std::min(max_step(blocks, s, dsa), max_step(blocks, y, dya));
        if (dtaua < 0) alpha_aff = std::min(alpha_aff, -tau / dtaua);
        if (dkappaa < 0) alpha_aff = std::min(alpha_aff, -kappa / dkappaa);
        alpha_aff = std::min(alpha_aff, 1.0);

        const double mu_aff = ((s + alpha_aff * dsa).dot(y + alpha_aff * dya) +
                               (tau + alpha_aff * dtaua) * (kappa + alpha_aff * dkappaa)) /
                              nu;
        double sigma = std::pow(std::clamp(mu_aff / mu, 0.0, 1.0), 3);
        sigma = std::clamp(sigma, 1e-8, 1.0 - 1e-8);

        // corrector
        const VectorXd corr = jordan_prod(blocks, sc.apply_Winv(blocks, dsa), sc.apply_W(blocks, dya));
        VectorXd d_s = sigma * mu * e - jordan_prod(blocks, lambda, lambda) - corr;
        const double d_kt = sigma * mu - tau * kappa - dtaua * dkappaa;

        VectorXd dx, dy, ds;
        double dtau, dkappa;
        direction(sigma, d_s, d_kt, dx, dy, ds, dtau, dkappa);

        double alpha = std::min(max_step(blocks, s, ds), max_step(blocks, y, dy));
        if (dtau < 0) alpha = std::min(alpha, -tau / dtau);
        if (dkappa < 0) alpha = std::min(alpha, -kappa / dkappa);
        alpha = std::min(opts.frac_to_boundary * alpha, 1.0);

        // keep strictly inside; back off on rounding trouble
        int backoff = 0;
        while (backoff < 30) {
            if (cone_margin(blocks, s + alpha * ds) > 0 && cone_margin(blocks, y + alpha * dy) > 0 &&
                tau + alpha * dtau > 0 && kappa + alpha * dkappa > 0)
                break;
            alpha *= 0.8;
            ++backoff;
        }
        if (backoff >= 30 || alpha <= 1e-13) {
            stop_note = "step collapsed";
            break;
        }

        x += alpha * dx;
        y += alpha * dy;
        s += alpha * ds;
        tau += alpha * dtau;
        kappa += alpha * dkappa;
    }

    // did not meet tolerances: report the best iterate with honest metrics
    res = best;
    res.status = Status::Indeterminate;
    res.iterations = iter;
    res.note = stop_note.empty() ? "max iterations" : stop_note;
    if (best.x.size() > 0) {
        res.iterate_inf_norm = best.x.lpNorm<Eigen::Infinity>();
        if (recent_pcost.size() >= 6) {
            const auto [lo, hi] = std::minmax_element(recent_pcost.begin(), recent_pcost.end());
            const double mid = 0.5 * (*lo + *hi);
            if (*hi - *lo <= 1e-7 * (1.0 + std::abs(mid))) {
                res.value_stabilized = true;
                res.stabilized_value = mid;
            }
        }
    }
    return res;
}

}  // namespace conelp::ipm

#endif
