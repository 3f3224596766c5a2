#pragma once

#include <utility>
#include <vector>

#include <Eigen/Core>

#include "esrom/fom.hpp"
#include "esrom/manifold.hpp"

namespace esrom {

struct LmOptions {
    int max_iters = 200;
    double gradient_tol = 1e-10;
    double step_tol = 1e-12;
    double initial_damping = 1e-3;
};

struct FitConfig {
    int r = 15;
    double lambda = 0.5; // quadratic-manifold ridge regularizer
    LmOptions lm;
    int parallel_rows = 0; // 0/1 = sequential (warm starts allowed)
    bool warm_start = true;
};

struct PodResult {
    Eigen::MatrixXd basis;            // N_h x r, Euclidean-orthonormal
    Eigen::VectorXd singular_values;  // all min(N_h, n_s) values
};

/// Leading left singular vectors of X.
PodResult pod_basis(const Eigen::MatrixXd& X, int r);

/// Generalized coordinates A = (Phi^T X)^T, one row per snapshot.
Eigen::MatrixXd pod_coordinates(const Eigen::MatrixXd& X, const Eigen::MatrixXd& basis);

/// Horizontal concatenation [X, eta(X)] used to build the entropy-augmented
/// linear basis. Appended columns reuse the times of their source snapshots.
SnapshotSet augment_snapshots(const SnapshotSet& snaps, const ConservationLaw& model);

/// Quadratic-manifold least squares fit: the first snapshot is the reference
/// shift, `basis` spans the shifted snapshots, and the quadratic coefficients
/// solve a per-row ridge problem with regularizer lambda.
QuadraticManifold fit_quadratic(const Eigen::MatrixXd& X, const Eigen::MatrixXd& basis,
                                double lambda);

struct RowFitInfo {
    int row = 0;
    int iters = 0;
    double residual = 0.0; // final ||y - phi_i(A)||
    bool fallback = false;
};

struct RationalFitResult {
    RationalQuadraticManifold manifold;
    std::vector<RowFitInfo> report;
};

/// Row-wise Levenberg-Marquardt fit of the pole-free rational quadratic
/// decoder to snapshot data at the POD coordinates A = (Phi^T X)^T. Rows are
/// independent; in sequential mode each row warm-starts from the previous row
/// of the same solution variable, and every row also starts from the all-ones
/// guess and the closed-form quadratic-numerator solution. Deterministic
/// neighbor refinement sweeps follow the row pass. Rows whose fit diverges
/// fall back to the nested model with zero denominator (L = 0).
RationalFitResult fit_rational_quadratic(const Eigen::MatrixXd& X,
                                         const Eigen::MatrixXd& basis,
                                         const FitConfig& config, int n_vars);

/// Element-wise reconstruction error phi(A) - X and its max absolute value.
std::pair<Eigen::MatrixXd, double> reconstruction_error(const Manifold& manifold,
                                                        const Eigen::MatrixXd& X,
                                                        const Eigen::MatrixXd& A);

namespace detail {

/// Packed parameter layout of one rational row fit:
/// [H packed (p<=q), h, u, L packed (p>=q)].
struct RationalRowModel {
    int r = 0;

    Eigen::Index n_params() const {
        return static_cast<Eigen::Index>(r) * (r + 1) + r + 1;
    }
    Eigen::Index h_offset() const { return static_cast<Eigen::Index>(r) * (r + 1) / 2; }
    Eigen::Index u_offset() const { return h_offset() + r; }
    Eigen::Index l_offset() const { return u_offset() + 1; }

    Eigen::VectorXd predict(const Eigen::MatrixXd& A, const Eigen::VectorXd& theta) const;
    /// Residual y - prediction and its Jacobian w.r.t. theta.
    void residual_jacobian(const Eigen::MatrixXd& A, const Eigen::VectorXd& y,
                           const Eigen::VectorXd& theta, Eigen::VectorXd& res,
                           Eigen::MatrixXd& jac) const;
    Eigen::MatrixXd unpack_sym(const Eigen::VectorXd& theta) const;
    Eigen::MatrixXd unpack_lower(const Eigen::VectorXd& theta) const;
};

struct LmOutcome {
    Eigen::VectorXd theta;
    int iters = 0;
    double residual_norm = 0.0;
    bool converged = false;
};

/// Damped Gauss-Newton (Levenberg-Marquardt) minimization of
/// ||y - phi(A; theta)||^2 for one row.
LmOutcome lm_fit_row(const RationalRowModel& model, const Eigen::MatrixXd& A,
                     const Eigen::VectorXd& y, const Eigen::VectorXd& theta0,
                     const LmOptions& opts);

} // namespace detail

} // namespace esrom
