#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include <Eigen/Dense>

#include "fraccond/inverse/config.hpp"

namespace fraccond::detail {

struct ModelEval {
    Eigen::VectorXd prediction;
    Eigen::MatrixXd jacobian; ///< empty when not requested
};

/// model(q, with_jacobian) evaluates the forward map at interior potential values q.
using ForwardModel = std::function<ModelEval(const Eigen::VectorXd&, bool)>;

struct GaussNewtonResult {
    Eigen::VectorXd q;
    std::vector<double> objective;
    std::vector<double> relative_residual;
    bool converged = false;
    int iterations = 0;
    double lambda = 0.0;
    double condition = 0.0;
    std::string status;
};

inline double normal_condition(const Eigen::MatrixXd& J, double lambda) {
    if (J.cols() == 0) return 1.0;
    const Eigen::VectorXd sv = Eigen::JacobiSVD<Eigen::MatrixXd>(J).singularValues();
    const double top = sv[0] * sv[0] + lambda;
    const double bottom = (sv.size() == J.cols() ? sv[sv.size() - 1] * sv[sv.size() - 1] : 0.0) + lambda;
    return bottom > 0.0 ? top / bottom : std::numeric_limits<double>::infinity();
}

/// Damped Gauss-Newton on |prediction(q) - observed|^2 + lambda |q|^2 from q = 0.
inline GaussNewtonResult gauss_newton(const ForwardModel& model, const Eigen::VectorXd& observed, Index unknowns,
                                      const InversionConfig& cfg) {
    cfg.validate();
    GaussNewtonResult res;
    res.q = Eigen::VectorXd::Zero(unknowns);
    res.lambda = cfg.reg_lambda;
    const double obs_norm = observed.norm();
    const double rel_scale = obs_norm > 0.0 ? obs_norm : 1.0;

    auto objective = [&](const Eigen::VectorXd& r, const Eigen::VectorXd& q) {
        return r.squaredNorm() + res.lambda * q.squaredNorm();
    };

    ModelEval cur = model(res.q, true);
    Eigen::VectorXd r = cur.prediction - observed;
    double f = objective(r, res.q);
    res.objective.push_back(f);
    res.relative_residual.push_back(r.norm() / rel_scale);

    for (int it = 0; it < cfg.max_iter; ++it) {
        res.condition = normal_condition(cur.jacobian, res.lambda);
        if (r.norm() / rel_scale < cfg.tol) {
            res.converged = true;
            res.status = "relative residual below tolerance";
            return res;
        }
        // augmented least squares [J; sqrt(lambda) I] dq = -[r; sqrt(lambda) q]
        Eigen::VectorXd dq;
        bool solved = false;
        for (int bump = 0; bump <= 3 && !solved; ++bump) {
            if (bump > 0) {
                const double floor = 1e-12 * cur.jacobian.colwise().squaredNorm().maxCoeff();
                res.lambda = std::max(10.0 * res.lambda, floor);
                f = objective(r, res.q);
            }
            const double sl = std::sqrt(res.lambda);
            const Index m = cur.jacobian.rows();
            Eigen::MatrixXd aug(m + unknowns, unknowns);
            aug.topRows(m) = cur.jacobian;
            aug.bottomRows(unknowns) = sl * Eigen::MatrixXd::Identity(unknowns, unknowns);
            Eigen::VectorXd rhs(m + unknowns);
            rhs.head(m) = -r;
            rhs.tail(unknowns) = -sl * res.q;
            Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(aug);
            if (qr.rank() == unknowns) {
                dq = qr.solve(rhs);
                solved = dq.allFinite();
            }
        }
        if (!solved) throw NumericalError("inverse: singular Gauss-Newton system after increasing lambda 3 times");

        const double predicted =
            f - ((r + cur.jacobian * dq).squaredNorm() + res.lambda * (res.q + dq).squaredNorm());
        double t = 1.0;
        bool accepted = false;
        while (t >= 1e-8) {
            const Eigen::VectorXd q_try = res.q + t * dq;
            try {
                ModelEval trial = model(q_try, false);
                const Eigen::VectorXd r_try = trial.prediction - observed;
                const double f_try = objective(r_try, q_try);
                if (f_try < f) {
                    res.q = q_try;
                    r = r_try;
                    f = f_try;
                    accepted = true;
                    break;
                }
            } catch (const SolverError&) {
                // trial potential made the interior block singular; shorten the step
            }
            t *= cfg.step_damping;
        }
        if (!accepted) {
            // no decrease representable in double precision: stationary unless the model promised more
            res.converged = predicted <= 1e-6 * f;
            res.status = res.converged ? "stationary point of the regularized objective"
                                       : "line search failed (damping underflow)";
            return res;
        }
        ++res.iterations;
        res.objective.push_back(f);
        res.relative_residual.push_back(r.norm() / rel_scale);
        cur = model(res.q, true);
    }
    res.condition = normal_condition(cur.jacobian, res.lambda);
    res.converged = r.norm() / rel_scale < cfg.tol;
    res.status = res.converged ? "relative residual below tolerance" : "iteration cap reached";
    return res;
}

} // namespace fraccond::detail
