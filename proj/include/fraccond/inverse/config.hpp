#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fraccond/forward/potential.hpp"

namespace fraccond {

/// Settings of the damped Gauss-Newton fit.
struct InversionConfig {
    double reg_lambda = 1e-12;
    int max_iter = 50;
    double tol = 1e-12;          ///< stop once |residual| / |observed| < tol
    double step_damping = 0.5;   ///< backtracking factor

    /// lambda = 1e-6, the setting for noisy or single-measurement data.
    static InversionConfig regularized() {
        InversionConfig c;
        c.reg_lambda = 1e-6;
        return c;
    }

    void validate() const {
        if (!(reg_lambda >= 0.0)) throw ValidationError("inversion.lambda must be >= 0");
        if (max_iter < 1) throw ValidationError("inversion.max_iter must be >= 1");
        if (!(tol > 0.0)) throw ValidationError("inversion.tol must be > 0");
        if (!(step_damping > 0.0 && step_damping < 1.0))
            throw ValidationError("inversion.step_damping must lie in (0, 1)");
    }
};

/// Result of fitting q to DN data.
struct PotentialFit {
    Potential q;
    std::vector<double> objective_history;  ///< misfit + lambda |q|^2 per accepted iterate
    std::vector<double> residual_history;   ///< |misfit| / |observed| per accepted iterate
    bool converged = false;
    int iterations = 0;
    double lambda_used = 0.0;
    double condition_estimate = 0.0;        ///< of J^T J + lambda I at the last iterate
    std::string status;
};

class ReconstructionError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

struct InversionReport {
    PotentialFit fit;
    NodeField m;
    std::optional<Conductivity> gamma;

    const Potential& q() const { return fit.q; }
    const std::vector<double>& residual_history() const { return fit.objective_history; }
    bool converged() const { return fit.converged; }
};

} // namespace fraccond
