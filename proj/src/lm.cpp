#include "xbarfilt/lm.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <algorithm>
#include <cmath>

#include "xbarfilt/error.hpp"

namespace xbarfilt {
namespace {

double half_sq(const std::vector<double>& r) {
    double s = 0.0;
    for (double v : r) s += v * v;
    return 0.5 * s;
}

}  // namespace

LmReport minimize_box(const ResidualFn& residual, std::vector<double> x0,
                      std::span<const double> lo, std::span<const double> hi,
                      const LmOptions& opts) {
    const std::size_t n = x0.size();
    require(lo.size() == n && hi.size() == n, "minimize_box: bounds size mismatch");
    for (std::size_t i = 0; i < n; ++i) {
        require(lo[i] <= hi[i], "minimize_box: empty box");
        x0[i] = std::clamp(x0[i], lo[i], hi[i]);
    }

    LmReport rep;
    rep.x = std::move(x0);
    std::vector<double> r;
    residual(rep.x, r);
    const std::size_t m = r.size();
    rep.initial_cost = rep.cost = half_sq(r);
    rep.cost_history.push_back(rep.cost);
    if (n == 0 || rep.cost == 0.0) {
        rep.converged = true;
        rep.status = "exact";
        return rep;
    }

    Eigen::MatrixXd jac(m, n);
    std::vector<double> r_probe;
    double lambda = opts.initial_lambda;
    bool need_jacobian = true;
    Eigen::MatrixXd jtj;
    Eigen::VectorXd jtr;

    for (int it = 0; it < opts.max_iterations; ++it) {
        if (need_jacobian) {
            std::vector<double> xp = rep.x;
            for (std::size_t j = 0; j < n; ++j) {
                // Step inward when the forward probe would leave the box.
                double h = opts.fd_step * std::max(1.0, std::abs(rep.x[j]));
                if (rep.x[j] + h > hi[j]) h = -h;
                xp[j] = rep.x[j] + h;
                residual(xp, r_probe);
                for (std::size_t k = 0; k < m; ++k) jac(k, j) = (r_probe[k] - r[k]) / h;
                xp[j] = rep.x[j];
            }
            const Eigen::Map<const Eigen::VectorXd> rv(r.data(), static_cast<Eigen::Index>(m));
            jtj = jac.transpose() * jac;
            jtr = jac.transpose() * rv;
            need_jacobian = false;
            if (jtr.lpNorm<Eigen::Infinity>() == 0.0) {
                rep.converged = true;
                rep.status = "zero gradient";
                break;
            }
        }

        Eigen::MatrixXd a = jtj;
        for (std::size_t j = 0; j < n; ++j) {
            const auto jj = static_cast<Eigen::Index>(j);
            a(jj, jj) += lambda * std::max(jtj(jj, jj), 1e-12);
        }
        const Eigen::VectorXd delta = a.ldlt().solve(-jtr);
        std::vector<double> cand(n);
        double step_norm = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double d = delta.allFinite() ? delta(static_cast<Eigen::Index>(j)) : 0.0;
            cand[j] = std::clamp(rep.x[j] + d, lo[j], hi[j]);
            step_norm = std::max(step_norm, std::abs(cand[j] - rep.x[j]));
        }
        rep.iterations = it + 1;
        if (step_norm < opts.xtol) {
            rep.converged = true;
            rep.status = "step below tolerance";
            break;
        }
        residual(cand, r_probe);
        const double cost = half_sq(r_probe);
        if (std::isfinite(cost) && cost < rep.cost) {
            const double gain = (rep.cost - cost) / rep.cost;
            rep.x = std::move(cand);
            r.swap(r_probe);
            rep.cost = cost;
            rep.cost_history.push_back(cost);
            lambda = std::max(lambda / 3.0, 1e-15);
            need_jacobian = true;
            if (gain < opts.ftol || cost == 0.0) {
                rep.converged = true;
                rep.status = "cost reduction below tolerance";
                break;
            }
        } else {
            lambda *= 4.0;
            if (lambda > opts.max_lambda) {
                rep.converged = true;
                rep.status = "damping limit reached";
                break;
            }
        }
    }
    if (!rep.converged) rep.status = "iteration limit reached";
    return rep;
}

}  // namespace xbarfilt
