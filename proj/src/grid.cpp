#include "esrom/grid.hpp"

#include <cmath>
#include <string>

#include "esrom/errors.hpp"

namespace esrom {

Grid::Grid(int n_cells, double domain_a, double domain_b, int n_vars,
           Eigen::VectorXd cell_widths)
    : n_cells_(n_cells), n_vars_(n_vars), a_(domain_a), b_(domain_b),
      widths_(std::move(cell_widths)) {
    if (n_cells_ < 1 || n_vars_ < 1)
        throw ContractError("Grid: n_cells and n_vars must be positive");
    if (!(b_ > a_))
        throw ContractError("Grid: domain must satisfy b > a");
    if (widths_.size() != n_cells_)
        throw ContractError("Grid: cell_widths length does not match n_cells");
    if ((widths_.array() <= 0.0).any())
        throw ContractError("Grid: all cell widths must be positive");
    double total = widths_.sum();
    if (std::abs(total - (b_ - a_)) > 1e-12 * (b_ - a_))
        throw ContractError("Grid: cell widths do not sum to the domain length");

    sqrt_weights_.resize(n_dof());
    for (int k = 0; k < n_vars_; ++k)
        for (int i = 0; i < n_cells_; ++i)
            sqrt_weights_[static_cast<Eigen::Index>(k) * n_cells_ + i] =
                std::sqrt(widths_[i]);
}

Grid Grid::uniform(int n_cells, double domain_a, double domain_b, int n_vars) {
    Eigen::VectorXd w =
        Eigen::VectorXd::Constant(n_cells, (domain_b - domain_a) / n_cells);
    return Grid(n_cells, domain_a, domain_b, n_vars, std::move(w));
}

double Grid::cell_center(int i) const {
    // Uniform grids are the common case; accumulate for generality.
    double x = a_;
    for (int j = 0; j < i; ++j) x += widths_[j];
    return x + 0.5 * widths_[i];
}

void Grid::check_length(const Eigen::VectorXd& y, const char* op) const {
    if (y.size() != n_dof())
        throw ContractError(std::string(op) + ": vector length " +
                            std::to_string(y.size()) + " != N_h = " +
                            std::to_string(n_dof()));
}

Eigen::VectorXd Grid::apply_delta_v(const Eigen::VectorXd& y) const {
    check_length(y, "apply_delta_v");
    Eigen::VectorXd out(n_dof());
    const int N = n_cells_;
    for (int k = 0; k < n_vars_; ++k) {
        const Eigen::Index off = static_cast<Eigen::Index>(k) * N;
        out[off] = y[off] - y[off + N - 1];
        for (int i = 1; i < N; ++i) out[off + i] = y[off + i] - y[off + i - 1];
    }
    return out;
}

Eigen::VectorXd Grid::apply_delta_i(const Eigen::VectorXd& y) const {
    check_length(y, "apply_delta_i");
    Eigen::VectorXd out(n_dof());
    const int N = n_cells_;
    for (int k = 0; k < n_vars_; ++k) {
        const Eigen::Index off = static_cast<Eigen::Index>(k) * N;
        for (int i = 0; i + 1 < N; ++i) out[off + i] = y[off + i + 1] - y[off + i];
        out[off + N - 1] = y[off] - y[off + N - 1];
    }
    return out;
}

Eigen::VectorXd Grid::mass_weight(const Eigen::VectorXd& y) const {
    check_length(y, "mass_weight");
    Eigen::VectorXd out(n_dof());
    for (int k = 0; k < n_vars_; ++k)
        out.segment(static_cast<Eigen::Index>(k) * n_cells_, n_cells_) =
            y.segment(static_cast<Eigen::Index>(k) * n_cells_, n_cells_)
                .cwiseProduct(widths_);
    return out;
}

Eigen::VectorXd Grid::mass_weight_inverse(const Eigen::VectorXd& y) const {
    check_length(y, "mass_weight_inverse");
    Eigen::VectorXd out(n_dof());
    for (int k = 0; k < n_vars_; ++k)
        out.segment(static_cast<Eigen::Index>(k) * n_cells_, n_cells_) =
            y.segment(static_cast<Eigen::Index>(k) * n_cells_, n_cells_)
                .cwiseQuotient(widths_);
    return out;
}

double Grid::weighted_dot(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const {
    check_length(x, "weighted_dot");
    return x.dot(mass_weight(y));
}

double Grid::weighted_norm(const Eigen::VectorXd& y) const {
    return std::sqrt(weighted_dot(y, y));
}

} // namespace esrom
