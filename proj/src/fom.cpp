#include "esrom/fom.hpp"

#include <cmath>

#include "esrom/errors.hpp"

namespace esrom {

namespace {

// Minmod-limited reconstruction jump in scaled entropy variables at interface
// i+1/2, following the second-order TeCNO construction: scale the stencil
// values by R^T at the interface average, limit cell slopes, and take the
// jump of the reconstructed one-sided values.
Eigen::VectorXd tecno2_scaled_jump(const ConservationLaw& model, const Grid& grid,
                                   const Eigen::VectorXd& eta_field,
                                   const Eigen::MatrixXd& R_interface, int i) {
    const int N = grid.n_cells();
    const int n = model.n_vars();
    const int im1 = (i + N - 1) % N;
    const int ip1 = (i + 1) % N;
    const int ip2 = (i + 2) % N;

    const Eigen::MatrixXd Rt = R_interface.transpose();
    const Eigen::VectorXd w_m1 = Rt * cell_state(eta_field, n, N, im1);
    const Eigen::VectorXd w_0 = Rt * cell_state(eta_field, n, N, i);
    const Eigen::VectorXd w_p1 = Rt * cell_state(eta_field, n, N, ip1);
    const Eigen::VectorXd w_p2 = Rt * cell_state(eta_field, n, N, ip2);

    Eigen::VectorXd jump(n);
    for (int k = 0; k < n; ++k) {
        const double dm = w_0[k] - w_m1[k];
        const double d0 = w_p1[k] - w_0[k];
        const double dp = w_p2[k] - w_p1[k];
        const double slope_l = minmod(dm, d0);
        const double slope_r = minmod(d0, dp);
        jump[k] = d0 - 0.5 * (slope_l + slope_r);
    }
    return jump;
}

} // namespace

FluxSplit assemble_fluxes(const ConservationLaw& model, const Grid& grid,
                          const Eigen::VectorXd& u_states,
                          const Eigen::VectorXd& eta_field, Dissipation d) {
    const int N = grid.n_cells();
    const int n = model.n_vars();
    if (u_states.size() != grid.n_dof() || eta_field.size() != grid.n_dof())
        throw ContractError("assemble_fluxes: field length != N_h");
    if (!model.supports(d))
        throw ContractError(model.name() + " does not support dissipation " +
                            to_string(d));

    FluxSplit out;
    out.ec.resize(grid.n_dof());
    out.diss = Eigen::VectorXd::Zero(grid.n_dof());

    for (int i = 0; i < N; ++i) {
        const int ip1 = (i + 1) % N;
        const Eigen::VectorXd u_l = cell_state(u_states, n, N, i);
        const Eigen::VectorXd u_r = cell_state(u_states, n, N, ip1);
        model.require_admissible(u_l, i);
        model.require_admissible(u_r, ip1);

        const Eigen::VectorXd fstar = model.ec_flux(u_l, u_r);
        for (int k = 0; k < n; ++k)
            out.ec[static_cast<Eigen::Index>(k) * N + i] = fstar[k];

        if (d == Dissipation::none) continue;

        Eigen::VectorXd dval;
        if (d == Dissipation::tecno2_minmod) {
            const Eigen::VectorXd u_avg = 0.5 * (u_l + u_r);
            Eigen::MatrixXd R;
            Eigen::VectorXd lam;
            model.scaled_eigen(u_avg, R, lam);
            const Eigen::VectorXd wjump =
                tecno2_scaled_jump(model, grid, eta_field, R, i);
            dval = 0.5 * R * (lam.cwiseAbs().asDiagonal() * wjump);
        } else {
            const Eigen::VectorXd deta = cell_state(eta_field, n, N, ip1) -
                                         cell_state(eta_field, n, N, i);
            dval = dissipation_apply(model, u_l, u_r, deta, d);
        }
        for (int k = 0; k < n; ++k)
            out.diss[static_cast<Eigen::Index>(k) * N + i] = dval[k];
    }
    return out;
}

Eigen::VectorXd fom_rhs(const ConservationLaw& model, const Grid& grid,
                        const Eigen::VectorXd& u_h, Dissipation d) {
    const long bad = first_inadmissible_cell(model, u_h, grid.n_cells());
    if (bad >= 0)
        throw AdmissibilityError(model.name() + ": inadmissible state in cell " +
                                     std::to_string(bad),
                                 bad);
    const Eigen::VectorXd eta = entropy_variables_field(model, u_h, grid.n_cells());
    const FluxSplit fluxes = assemble_fluxes(model, grid, u_h, eta, d);
    return grid.mass_weight_inverse(grid.apply_delta_v(fluxes.diss) -
                                    grid.apply_delta_v(fluxes.ec));
}

std::pair<double, double> rate_split_from(const Grid& grid,
                                          const Eigen::VectorXd& eta_field,
                                          const FluxSplit& fluxes) {
    const double rate_cons = -eta_field.dot(grid.apply_delta_v(fluxes.ec));
    const double rate_diss = eta_field.dot(grid.apply_delta_v(fluxes.diss));
    return {rate_cons, rate_diss};
}

std::pair<double, double> fom_entropy_rate_split(const ConservationLaw& model,
                                                 const Grid& grid,
                                                 const Eigen::VectorXd& u_h,
                                                 Dissipation d) {
    const Eigen::VectorXd eta = entropy_variables_field(model, u_h, grid.n_cells());
    const FluxSplit fluxes = assemble_fluxes(model, grid, u_h, eta, d);
    return rate_split_from(grid, eta, fluxes);
}

Eigen::VectorXd rk4_step(
    const Eigen::VectorXd& y, double dt,
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& rhs) {
    if (!(dt > 0.0)) throw ContractError("rk4_step: dt must be positive");
    const Eigen::VectorXd k1 = rhs(y);
    const Eigen::VectorXd k2 = rhs(y + 0.5 * dt * k1);
    const Eigen::VectorXd k3 = rhs(y + 0.5 * dt * k2);
    const Eigen::VectorXd k4 = rhs(y + dt * k3);
    return y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

FomResult run_fom(const ConservationLaw& model, const Grid& grid,
                  const std::function<Eigen::VectorXd(double)>& initial_condition,
                  double dt, double t_end, int snapshot_stride, Dissipation d) {
    if (!(dt > 0.0) || !(t_end > 0.0))
        throw ContractError("run_fom: dt and t_end must be positive");
    if (snapshot_stride < 1) throw ContractError("run_fom: stride must be >= 1");

    const int N = grid.n_cells();
    const int n = model.n_vars();
    const int n_steps = static_cast<int>(std::llround(t_end / dt));
    const int n_snaps = n_steps / snapshot_stride + 1;

    Eigen::VectorXd u_h(grid.n_dof());
    for (int i = 0; i < N; ++i) {
        const Eigen::VectorXd u0 = initial_condition(grid.cell_center(i));
        if (u0.size() != n)
            throw ContractError("run_fom: initial condition returned wrong state size");
        set_cell_state(u_h, n, N, i, u0);
    }

    FomResult result;
    result.snapshots.data.resize(grid.n_dof(), n_snaps);
    result.snapshots.times.resize(n_snaps);
    result.snapshots.n_vars = n;
    result.snapshots.n_cells = N;
    result.snapshots.domain_a = grid.domain_a();
    result.snapshots.domain_b = grid.domain_b();

    auto rhs = [&](const Eigen::VectorXd& y) { return fom_rhs(model, grid, y, d); };

    int snap = 0;
    for (int step = 0; step <= n_steps; ++step) {
        const double t = step * dt;
        if (step % snapshot_stride == 0 && snap < n_snaps) {
            result.snapshots.data.col(snap) = u_h;
            result.snapshots.times[snap] = t;
            ++snap;
        }
        const auto [rc, rd] = fom_entropy_rate_split(model, grid, u_h, d);
        result.trace.t.push_back(t);
        result.trace.total_entropy.push_back(total_entropy(model, grid, u_h));
        result.trace.rate_cons.push_back(rc);
        result.trace.rate_diss.push_back(rd);

        if (step == n_steps) break;
        try {
            u_h = rk4_step(u_h, dt, rhs);
        } catch (const AdmissibilityError& e) {
            throw AdmissibilityError("run_fom failed at t = " + std::to_string(t) +
                                         ": " + e.what(),
                                     e.cell());
        }
    }
    return result;
}

} // namespace esrom
