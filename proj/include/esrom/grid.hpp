#pragma once

#include <Eigen/Core>

namespace esrom {

/// Periodic 1-D finite-volume mesh.
///
/// Degrees of freedom are ordered variable-major: DOF k*N + i holds conserved
/// variable k in cell i, so the difference operators have Kronecker structure
/// I (x) D with D an N x N periodic stencil. Interface-based vectors use the
/// same convention with slot i holding interface i+1/2.
class Grid {
public:
    Grid(int n_cells, double domain_a, double domain_b, int n_vars,
         Eigen::VectorXd cell_widths);

    static Grid uniform(int n_cells, double domain_a, double domain_b, int n_vars);

    int n_cells() const { return n_cells_; }
    int n_vars() const { return n_vars_; }
    Eigen::Index n_dof() const { return static_cast<Eigen::Index>(n_vars_) * n_cells_; }
    double domain_a() const { return a_; }
    double domain_b() const { return b_; }
    const Eigen::VectorXd& cell_widths() const { return widths_; }
    double cell_center(int i) const;

    /// (I (x) Dv) y for an interface-based y: out_i = y_i - y_{i-1}, periodic.
    Eigen::VectorXd apply_delta_v(const Eigen::VectorXd& y) const;

    /// (I (x) Di) y for a volume-based y: out_i = y_{i+1} - y_i, periodic.
    Eigen::VectorXd apply_delta_i(const Eigen::VectorXd& y) const;

    /// Omega_h y (element-wise cell widths, replicated per variable).
    Eigen::VectorXd mass_weight(const Eigen::VectorXd& y) const;

    /// Omega_h^{-1} y.
    Eigen::VectorXd mass_weight_inverse(const Eigen::VectorXd& y) const;

    /// <x, Omega_h y>.
    double weighted_dot(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const;

    /// ||y||_{Omega_h}.
    double weighted_norm(const Eigen::VectorXd& y) const;

    /// Length-N_h vector of sqrt(Delta x) per DOF (row scaling for weighted
    /// least squares).
    const Eigen::VectorXd& sqrt_weights() const { return sqrt_weights_; }

private:
    void check_length(const Eigen::VectorXd& y, const char* op) const;

    int n_cells_;
    int n_vars_;
    double a_, b_;
    Eigen::VectorXd widths_;
    Eigen::VectorXd sqrt_weights_;
};

} // namespace esrom
