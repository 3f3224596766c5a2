#include "esrom/rom.hpp"

#include <cmath>

#include "esrom/errors.hpp"

namespace esrom {

std::string to_string(RomVariant v) {
    return v == RomVariant::generic ? "generic" : "entropy_stable";
}

RomVariant rom_variant_from_string(const std::string& s) {
    if (s == "generic") return RomVariant::generic;
    if (s == "entropy_stable") return RomVariant::entropy_stable;
    throw ConfigError("unknown ROM variant: " + s);
}

namespace {

void require_decoded_admissible(const ConservationLaw& model, const Grid& grid,
                                const Eigen::VectorXd& u_r) {
    const long bad = first_inadmissible_cell(model, u_r, grid.n_cells());
    if (bad >= 0)
        throw AdmissibilityError(model.name() +
                                     ": decoded ROM state inadmissible in cell " +
                                     std::to_string(bad),
                                 bad);
}

struct RomEvaluation {
    Eigen::VectorXd u_flux;   // state the fluxes are evaluated at
    Eigen::VectorXd eta_jump; // field whose jumps feed the dissipation
    Eigen::VectorXd eta_left; // projected entropy variables (rate split)
    FluxSplit fluxes;
    TangentSolver solver;
    double eps_pi = 0.0;
};

RomEvaluation evaluate(const ConservationLaw& model, const Grid& grid,
                       const Manifold& manifold, const Eigen::VectorXd& z,
                       Dissipation d, RomVariant variant) {
    if (!z.allFinite())
        throw AdmissibilityError("reduced coordinates became non-finite", -1);
    const Eigen::VectorXd u_r = manifold.decode(z);
    require_decoded_admissible(model, grid, u_r);
    const Eigen::VectorXd eta_r = entropy_variables_field(model, u_r, grid.n_cells());

    TangentSolver solver(manifold.jacobian(z), grid);
    const Eigen::VectorXd eta_tilde = solver.project(eta_r);

    if (variant == RomVariant::generic) {
        const FluxSplit fluxes = assemble_fluxes(model, grid, u_r, eta_r, d);
        return {u_r, eta_r, eta_tilde, fluxes, std::move(solver), 0.0};
    }

    const Eigen::VectorXd u_tilde =
        entropy_variables_inverse_field(model, eta_tilde, grid.n_cells());
    const double eps_pi =
        grid.weighted_norm(u_r - u_tilde) / grid.weighted_norm(u_r);
    const FluxSplit fluxes = assemble_fluxes(model, grid, u_tilde, eta_tilde, d);
    return {u_tilde, eta_tilde, eta_tilde, fluxes, std::move(solver), eps_pi};
}

Eigen::VectorXd rhs_from(const Grid& grid, const RomEvaluation& eval) {
    const Eigen::VectorXd force = grid.apply_delta_v(eval.fluxes.diss) -
                                  grid.apply_delta_v(eval.fluxes.ec);
    return eval.solver.plus_apply(force);
}

} // namespace

EntropyProjection entropy_project(const ConservationLaw& model, const Grid& grid,
                                  const Manifold& manifold, const Eigen::VectorXd& z) {
    const Eigen::VectorXd u_r = manifold.decode(z);
    require_decoded_admissible(model, grid, u_r);
    const Eigen::VectorXd eta_r = entropy_variables_field(model, u_r, grid.n_cells());
    TangentSolver solver(manifold.jacobian(z), grid);
    EntropyProjection out;
    out.u_r = u_r;
    out.eta_r = eta_r;
    out.eta_tilde = solver.project(eta_r);
    out.u_tilde = entropy_variables_inverse_field(model, out.eta_tilde, grid.n_cells());
    out.eps_pi = grid.weighted_norm(out.u_r - out.u_tilde) / grid.weighted_norm(out.u_r);
    return out;
}

Eigen::VectorXd rom_rhs(const ConservationLaw& model, const Grid& grid,
                        const Manifold& manifold, const Eigen::VectorXd& z,
                        Dissipation d, RomVariant variant) {
    return rhs_from(grid, evaluate(model, grid, manifold, z, d, variant));
}

std::pair<double, double> rom_entropy_rate_split(const ConservationLaw& model,
                                                 const Grid& grid,
                                                 const Manifold& manifold,
                                                 const Eigen::VectorXd& z,
                                                 Dissipation d, RomVariant variant) {
    const RomEvaluation eval = evaluate(model, grid, manifold, z, d, variant);
    return rate_split_from(grid, eval.eta_left, eval.fluxes);
}

RomTrace run_rom(const ConservationLaw& model, const Grid& grid,
                 const Manifold& manifold, const RomConfig& config,
                 const Eigen::VectorXd& z0) {
    if (!(config.dt > 0.0) || !(config.t_end > 0.0))
        throw ContractError("run_rom: dt and t_end must be positive");
    if (config.coord_stride < 1)
        throw ContractError("run_rom: coordinate stride must be >= 1");
    if (z0.size() != manifold.reduced_dim())
        throw ContractError("run_rom: initial coordinates have wrong length");

    const bool es = config.variant == RomVariant::entropy_stable;
    const int n_steps = static_cast<int>(std::llround(config.t_end / config.dt));
    const int n_samples = n_steps / config.coord_stride + 1;

    RomTrace trace;
    trace.coords.resize(z0.size(), n_samples);
    trace.coord_times.resize(n_samples);

    Eigen::VectorXd z = z0;
    auto rhs = [&](const Eigen::VectorXd& y) {
        return rom_rhs(model, grid, manifold, y, config.dissipation, config.variant);
    };

    int sample = 0;
    for (int step = 0; step <= n_steps; ++step) {
        const double t = step * config.dt;
        try {
            const RomEvaluation eval =
                evaluate(model, grid, manifold, z, config.dissipation, config.variant);
            const Eigen::VectorXd u_decoded = manifold.decode(z);
            const auto [rc, rd] = rate_split_from(grid, eval.eta_left, eval.fluxes);
            trace.t.push_back(t);
            trace.total_entropy.push_back(total_entropy(model, grid, u_decoded));
            trace.rate_cons.push_back(rc);
            trace.rate_diss.push_back(rd);
            if (es) trace.eps_pi.push_back(eval.eps_pi);
            if (config.tse) trace.alpha.push_back(z[z.size() - 1]);
            if (step % config.coord_stride == 0 && sample < n_samples) {
                trace.coords.col(sample) = z;
                trace.coord_times[sample] = t;
                ++sample;
            }
            if (step == n_steps) break;
            z = rk4_step(z, config.dt, rhs);
            if (!z.allFinite())
                throw AdmissibilityError("reduced state became non-finite", -1);
        } catch (const InadmissibleProjectionError& e) {
            trace.status = "failed";
            trace.fail_time = t;
            trace.fail_reason = "inadmissible_projection";
            trace.fail_detail = e.what();
            break;
        } catch (const AdmissibilityError& e) {
            trace.status = "failed";
            trace.fail_time = t;
            trace.fail_reason = "inadmissible_state";
            trace.fail_detail = e.what();
            break;
        } catch (const SingularTangentError& e) {
            trace.status = "failed";
            trace.fail_time = t;
            trace.fail_reason = "singular_tangent_space";
            trace.fail_detail = e.what();
            break;
        }
    }
    trace.coords.conservativeResize(Eigen::NoChange, sample);
    trace.coord_times.conservativeResize(sample);
    return trace;
}

Eigen::VectorXd initial_coords(const SnapshotSet& snaps, const Eigen::MatrixXd& basis,
                               bool tse) {
    if (snaps.n_snapshots() < 1)
        throw ContractError("initial_coords: empty snapshot set");
    if (basis.rows() != snaps.data.rows())
        throw ContractError("initial_coords: basis/data row mismatch");
    const Eigen::VectorXd a0 = basis.transpose() * snaps.data.col(0);
    if (!tse) return a0;
    Eigen::VectorXd z0(a0.size() + 1);
    z0 << a0, 0.0;
    return z0;
}

} // namespace esrom
