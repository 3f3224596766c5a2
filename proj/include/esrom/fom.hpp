#pragma once

#include <functional>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "esrom/grid.hpp"
#include "esrom/physics.hpp"

namespace esrom {

/// Snapshot matrix X (column j = u_h(t_j)) plus sample times and grid/model
/// metadata.
struct SnapshotSet {
    Eigen::MatrixXd data;   // N_h x n_s
    Eigen::VectorXd times;  // n_s
    int n_vars = 1;
    int n_cells = 0;
    double domain_a = 0.0;
    double domain_b = 1.0;

    Eigen::Index n_dof() const { return data.rows(); }
    int n_snapshots() const { return static_cast<int>(data.cols()); }
    Grid grid() const { return Grid::uniform(n_cells, domain_a, domain_b, n_vars); }
};

/// Dense per-step entropy budget of a run.
struct EntropyTrace {
    std::vector<double> t;
    std::vector<double> total_entropy;
    std::vector<double> rate_cons;
    std::vector<double> rate_diss;
};

/// Interface flux vector split into its entropy-conserving part f* and the
/// dissipation part D * (jump), both variable-major over interfaces.
struct FluxSplit {
    Eigen::VectorXd ec;
    Eigen::VectorXd diss;
};

/// Assemble the interface fluxes of the flux-differencing scheme.
///
/// `u_states` holds the cell states the two-point fluxes are evaluated at and
/// `eta_field` the entropy-variable field whose jumps feed the dissipation
/// operator. For the FOM both come from the same state; the entropy-projected
/// ROM passes the projected pair instead.
FluxSplit assemble_fluxes(const ConservationLaw& model, const Grid& grid,
                          const Eigen::VectorXd& u_states,
                          const Eigen::VectorXd& eta_field, Dissipation d);

/// Semi-discrete right-hand side du_h/dt = Omega^{-1}(-Dv f* + Dv D Di eta).
Eigen::VectorXd fom_rhs(const ConservationLaw& model, const Grid& grid,
                        const Eigen::VectorXd& u_h, Dissipation d);

/// (rate_cons, rate_diss) of dS_h/dt given the left entropy-variable field
/// and assembled fluxes: rate_cons = -eta^T Dv f*, rate_diss = eta^T Dv diss.
std::pair<double, double> rate_split_from(const Grid& grid,
                                          const Eigen::VectorXd& eta_field,
                                          const FluxSplit& fluxes);

/// FOM entropy rate split at a state.
std::pair<double, double> fom_entropy_rate_split(const ConservationLaw& model,
                                                 const Grid& grid,
                                                 const Eigen::VectorXd& u_h,
                                                 Dissipation d);

/// One classical RK4 step of an autonomous system.
Eigen::VectorXd rk4_step(const Eigen::VectorXd& y, double dt,
                         const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& rhs);

struct FomResult {
    SnapshotSet snapshots;
    EntropyTrace trace;
};

/// Integrate the FOM with RK4. The initial condition is sampled at cell
/// centers; snapshots are captured at macro steps 0, stride, 2*stride, ...
/// and the entropy budget is recorded at every step.
FomResult run_fom(const ConservationLaw& model, const Grid& grid,
                  const std::function<Eigen::VectorXd(double)>& initial_condition,
                  double dt, double t_end, int snapshot_stride, Dissipation d);

} // namespace esrom
