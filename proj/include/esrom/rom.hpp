#pragma once

#include <limits>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "esrom/fom.hpp"
#include "esrom/manifold.hpp"

namespace esrom {

enum class RomVariant { generic, entropy_stable };

std::string to_string(RomVariant v);
RomVariant rom_variant_from_string(const std::string& s);

struct RomConfig {
    RomVariant variant = RomVariant::entropy_stable;
    bool tse = true; // informational; the manifold passed in carries the lift
    double dt = 1e-3;
    double t_end = 1.0;
    int coord_stride = 5; // reduced coordinates stored every this many steps
    Dissipation dissipation = Dissipation::none;
};

/// Entropy projection at a reduced state: eta_tilde = J J^dagger eta(u_r) and
/// u_tilde = u(eta_tilde) (Jacobian evaluated at the non-projected state).
struct EntropyProjection {
    Eigen::VectorXd u_r;
    Eigen::VectorXd eta_r;
    Eigen::VectorXd u_tilde;
    Eigen::VectorXd eta_tilde;
    double eps_pi = 0.0; // ||u_r - u_tilde||_Om / ||u_r||_Om
};

EntropyProjection entropy_project(const ConservationLaw& model, const Grid& grid,
                                  const Manifold& manifold, const Eigen::VectorXd& z);

/// Right-hand side of the manifold Galerkin ROM. The generic variant
/// evaluates fluxes at u_r = decode(z); the entropy-stable variant at the
/// entropy-projected state with projected entropy-variable jumps.
Eigen::VectorXd rom_rhs(const ConservationLaw& model, const Grid& grid,
                        const Manifold& manifold, const Eigen::VectorXd& z,
                        Dissipation d, RomVariant variant);

/// Entropy production split (rate_cons, rate_diss) of the reduced total
/// entropy evolution at a reduced state.
std::pair<double, double> rom_entropy_rate_split(const ConservationLaw& model,
                                                 const Grid& grid,
                                                 const Manifold& manifold,
                                                 const Eigen::VectorXd& z,
                                                 Dissipation d, RomVariant variant);

struct RomTrace {
    std::vector<double> t;
    std::vector<double> total_entropy;
    std::vector<double> rate_cons;
    std::vector<double> rate_diss;
    std::vector<double> eps_pi; // empty for the generic variant
    std::vector<double> alpha;  // empty without TSE

    Eigen::MatrixXd coords; // strided reduced coordinates, one column per sample
    Eigen::VectorXd coord_times;

    std::string status = "ok";
    double fail_time = std::numeric_limits<double>::quiet_NaN();
    std::string fail_reason; // keyword: inadmissible_projection | inadmissible_state | singular_tangent_space
    std::string fail_detail;

    bool failed() const { return status != "ok"; }
};

/// Integrate the ROM with RK4, recording the dense entropy budget and strided
/// coordinates. Typed numerical failures (inadmissible states or projections,
/// singular tangent spaces) terminate the run and are recorded in the trace.
RomTrace run_rom(const ConservationLaw& model, const Grid& grid,
                 const Manifold& manifold, const RomConfig& config,
                 const Eigen::VectorXd& z0);

/// POD initial coordinates a_0 = Phi^T x_0, with the TSE coordinate appended
/// as zero when requested.
Eigen::VectorXd initial_coords(const SnapshotSet& snaps, const Eigen::MatrixXd& basis,
                               bool tse);

} // namespace esrom
