// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// criterion fails. Paper-scale results that depend on long fits run at desk
// scale; the full-scale rational Burgers fit is enabled with
// ESROM_ACCEPTANCE_FULL=1.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "esrom/diagnostics.hpp"
#include "esrom/errors.hpp"
#include "esrom/fitting.hpp"
#include "esrom/fom.hpp"
#include "esrom/manifold.hpp"
#include "esrom/physics.hpp"
#include "esrom/rom.hpp"

using namespace esrom;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

constexpr double kPi = 3.14159265358979323846;

struct Check {
    std::string detail;
    bool ok = true;

    void require(bool cond, const std::string& what) {
        if (!cond && ok) {
            ok = false;
            detail = what;
        }
    }
};

VectorXd state_of(std::initializer_list<double> vals) {
    VectorXd v(static_cast<Eigen::Index>(vals.size()));
    Eigen::Index i = 0;
    for (double x : vals) v[i++] = x;
    return v;
}

VectorXd random_state(const ConservationLaw& model, std::mt19937& rng) {
    std::uniform_real_distribution<double> pos(0.1, 3.0);
    std::uniform_real_distribution<double> vel(-2.0, 2.0);
    if (model.n_vars() == 1) return state_of({vel(rng)});
    if (model.n_vars() == 2) {
        const double h = pos(rng);
        return state_of({h, h * vel(rng)});
    }
    const double rho = pos(rng);
    const double v = vel(rng);
    const double p = pos(rng);
    return state_of({rho, rho * v, p / 0.4 + 0.5 * rho * v * v});
}

MatrixXd random_matrix(Eigen::Index rows, Eigen::Index cols, std::mt19937& rng) {
    std::normal_distribution<double> dist;
    MatrixXd m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
        for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = dist(rng);
    return m;
}

// --- shared experiment builders --------------------------------------------

VectorXd ic_burgers_sine(double x) {
    return state_of({std::sin(2.0 * kPi * x) + 1.0});
}
VectorXd ic_sw_dambreak(double x) {
    return state_of({std::abs(x) < 0.2 ? 1.5 : 1.0, 0.0});
}
VectorXd ic_sw_perturbation(double x) {
    return state_of({1.0 + 0.1 * std::exp(-100.0 * x * x), 0.0});
}
VectorXd ic_euler_sod(double x) {
    const bool inner = x > 0.25 && x < 0.75;
    return state_of({inner ? 1.0 : 0.125, 0.0, (inner ? 1.0 : 0.1) / 0.4});
}

struct FittedRom {
    SnapshotSet snaps;
    EntropyTrace fom_trace;
    PodResult pod;
    std::shared_ptr<RationalQuadraticManifold> base;
    std::shared_ptr<TseManifold> tse;
    VectorXd z0; // with the TSE coordinate
    VectorXd a0; // without
};

FittedRom fit_rational_rom(const std::shared_ptr<ConservationLaw>& model,
                           const Grid& grid,
                           const std::function<VectorXd(double)>& ic, double dt,
                           double t_end, Dissipation fom_diss, int r,
                           int lm_iters = 200) {
    FittedRom out;
    FomResult fom = run_fom(*model, grid, ic, dt, t_end, 5, fom_diss);
    out.snaps = std::move(fom.snapshots);
    out.fom_trace = std::move(fom.trace);
    out.pod = pod_basis(out.snaps.data, r);
    FitConfig cfg;
    cfg.r = r;
    cfg.lm.max_iters = lm_iters;
    out.base = std::make_shared<RationalQuadraticManifold>(
        fit_rational_quadratic(out.snaps.data, out.pod.basis, cfg, model->n_vars())
            .manifold);
    out.tse = std::make_shared<TseManifold>(out.base, model);
    out.a0 = out.pod.basis.transpose() * out.snaps.data.col(0);
    out.z0.resize(r + 1);
    out.z0 << out.a0, 0.0;
    return out;
}

// --- criteria ---------------------------------------------------------------

Check criterion_ec_flux() {
    Check c;
    std::mt19937 rng(101);
    const std::unique_ptr<ConservationLaw> models[] = {
        std::make_unique<Burgers>(), std::make_unique<ShallowWater>(3.0),
        std::make_unique<Euler>(1.4)};
    for (const auto& model : models) {
        for (int trial = 0; trial < 1000 && c.ok; ++trial) {
            const VectorXd ul = random_state(*model, rng);
            const VectorXd ur = random_state(*model, rng);
            const VectorXd f = model->ec_flux(ul, ur);
            c.require((f - model->ec_flux(ur, ul)).lpNorm<Eigen::Infinity>() == 0.0,
                      model->name() + ": symmetry not exact");
            const VectorXd fc = model->ec_flux(ul, ul);
            const VectorXd fe = model->flux(ul);
            c.require((fc - fe).lpNorm<Eigen::Infinity>() <=
                          1e-13 * (1.0 + fe.lpNorm<Eigen::Infinity>()),
                      model->name() + ": consistency beyond roundoff");
            const VectorXd deta =
                model->entropy_variables(ul) - model->entropy_variables(ur);
            const double dpsi =
                model->flux_potential(ul) - model->flux_potential(ur);
            const double tol = 1e-11 * (1.0 + std::abs(model->flux_potential(ul)) +
                                        std::abs(model->flux_potential(ur)));
            c.require(std::abs(deta.dot(f) - dpsi) <= tol,
                      model->name() + ": entropy-conservation identity violated");
        }
    }
    return c;
}

Check criterion_fom_semidiscrete() {
    Check c;
    Burgers model;
    const Grid grid = Grid::uniform(64, 0.0, 1.0, 1);
    // smooth window (pre-shock) of the standard sine experiment
    for (auto d : {Dissipation::none, Dissipation::llf}) {
        const auto result = run_fom(model, grid, ic_burgers_sine, 1e-3, 0.14, 5, d);
        for (size_t i = 0; i < result.trace.t.size(); ++i) {
            if (d == Dissipation::none)
                c.require(std::abs(result.trace.rate_cons[i]) <=
                              1e-10 * (1.0 + std::abs(result.trace.total_entropy[i])),
                          "rate_cons above tolerance at step " + std::to_string(i));
            else
                c.require(result.trace.rate_diss[i] <= 0.0,
                          "positive rate_diss at step " + std::to_string(i));
        }
    }
    return c;
}

Check criterion_fom_entropy_conservation() {
    Check c;
    ShallowWater model(3.0);
    const Grid grid = Grid::uniform(128, -1.0, 1.0, 2);
    const auto result =
        run_fom(model, grid, ic_sw_perturbation, 5e-4, 0.5, 5, Dissipation::none);
    const double s0 = result.trace.total_entropy.front();
    const double sT = result.trace.total_entropy.back();
    c.require(std::abs(sT - s0) <= 1e-8 * std::abs(s0),
              "entropy drift " + std::to_string(std::abs(sT - s0) / std::abs(s0)));
    return c;
}

Check criterion_esrom_split_dambreak() {
    Check c;
    auto model = std::make_shared<ShallowWater>(3.0);
    const Grid grid = Grid::uniform(128, -1.0, 1.0, 2);
    const FittedRom rom = fit_rational_rom(model, grid, ic_sw_dambreak, 5e-4, 1.0,
                                           Dissipation::roe1, 8);
    RomConfig cfg;
    cfg.variant = RomVariant::entropy_stable;
    cfg.tse = true;
    cfg.dt = 5e-4;
    cfg.t_end = 1.0;
    cfg.dissipation = Dissipation::roe1;
    const RomTrace trace = run_rom(*model, grid, *rom.tse, cfg, rom.z0);
    c.require(!trace.failed(), "run failed at t = " + std::to_string(trace.fail_time) +
                                   " (" + trace.fail_reason + ")");
    for (size_t i = 0; i < trace.t.size() && c.ok; ++i) {
        c.require(std::abs(trace.rate_cons[i]) <=
                      1e-10 * (1.0 + std::abs(trace.total_entropy[i])),
                  "rate_cons " + std::to_string(trace.rate_cons[i]) + " at t = " +
                      std::to_string(trace.t[i]));
        c.require(trace.rate_diss[i] <= 1e-12,
                  "rate_diss " + std::to_string(trace.rate_diss[i]) + " at t = " +
                      std::to_string(trace.t[i]));
    }
    if (c.ok) {
        // qualitative: the ES-ROM entropy deviation from the FOM stays
        // approximately constant over the first half of the run
        std::vector<double> eps_s;
        for (size_t i = 0; i < trace.t.size() && trace.t[i] < 0.5; ++i)
            eps_s.push_back(std::abs(trace.total_entropy[i] -
                                     rom.fom_trace.total_entropy[i]));
        double mean = 0.0;
        for (double e : eps_s) mean += e;
        mean /= static_cast<double>(eps_s.size());
        double var = 0.0;
        for (double e : eps_s) var += (e - mean) * (e - mean);
        const double spread =
            std::sqrt(var / static_cast<double>(eps_s.size())) / mean;
        c.require(spread < 1.0, "eps_S is not approximately constant (stddev/mean = " +
                                    std::to_string(spread) + ")");
    }
    return c;
}

Check criterion_esrom_conservation_smooth() {
    Check c;
    auto model = std::make_shared<ShallowWater>(3.0);
    const Grid grid = Grid::uniform(128, -1.0, 1.0, 2);
    const FittedRom rom = fit_rational_rom(model, grid, ic_sw_perturbation, 5e-4,
                                           0.5, Dissipation::none, 8);
    RomConfig cfg;
    cfg.variant = RomVariant::entropy_stable;
    cfg.tse = true;
    cfg.dt = 5e-4;
    cfg.t_end = 0.5;
    cfg.dissipation = Dissipation::none;
    const RomTrace es = run_rom(*model, grid, *rom.tse, cfg, rom.z0);
    c.require(!es.failed(), "ES run failed (" + es.fail_reason + ")");
    if (!c.ok) return c;
    const double s0 = es.total_entropy.front();
    double worst = 0.0;
    for (double s : es.total_entropy) worst = std::max(worst, std::abs(s - s0));
    c.require(worst <= 1e-6 * std::abs(s0),
              "ES entropy drift " + std::to_string(worst / std::abs(s0)));

    // the generic ROM on the same manifold produces entropy
    RomConfig gen_cfg = cfg;
    gen_cfg.variant = RomVariant::generic;
    gen_cfg.tse = false;
    const RomTrace gen = run_rom(*model, grid, *rom.base, gen_cfg, rom.a0);
    c.require(!gen.failed(), "generic run failed (" + gen.fail_reason + ")");
    if (!c.ok) return c;
    size_t producing = 0;
    for (double rc : gen.rate_cons)
        if (rc > 1e-6) ++producing;
    c.require(producing * 100 >= gen.rate_cons.size(),
              "generic ROM produced entropy at only " + std::to_string(producing) +
                  " of " + std::to_string(gen.rate_cons.size()) + " steps");
    return c;
}

double linear_eps_xt(const MatrixXd& X, int r) {
    const PodResult pod = pod_basis(X, r);
    return reconstruction_error(LinearManifold(pod.basis), X,
                                pod_coordinates(X, pod.basis))
        .second;
}

double quadratic_eps_xt(const MatrixXd& X, int r, double lambda) {
    const PodResult pod = pod_basis(X.colwise() - X.col(0), r);
    const QuadraticManifold quad = fit_quadratic(X, pod.basis, lambda);
    const MatrixXd A =
        (pod.basis.transpose() * (X.colwise() - quad.shift())).transpose();
    return reconstruction_error(quad, X, A).second;
}

Check criterion_manifold_accuracy() {
    Check c;
    Burgers model;
    // full-scale dataset: the linear and quadratic fits are deterministic
    const Grid grid = Grid::uniform(300, 0.0, 1.0, 1);
    const SnapshotSet snaps =
        run_fom(model, grid, ic_burgers_sine, 1e-3, 1.0, 5, Dissipation::llf)
            .snapshots;
    c.require(snaps.n_snapshots() == 201, "full config snapshot count");
    const double eps_lin = linear_eps_xt(snaps.data, 15);
    c.require(std::abs(eps_lin - 0.675) <= 0.01,
              "POD r=15 eps_xt_max = " + std::to_string(eps_lin));
    const double eps_quad = quadratic_eps_xt(snaps.data, 15, 0.5);
    c.require(std::abs(eps_quad - 0.456) <= 0.05,
              "quadratic r=15 eps_xt_max = " + std::to_string(eps_quad));

    // reduced configuration: rational fit must be at least 10x better than POD
    const Grid grid_r = Grid::uniform(128, 0.0, 1.0, 1);
    const SnapshotSet reduced =
        run_fom(model, grid_r, ic_burgers_sine, 2e-3, 1.0, 5, Dissipation::llf)
            .snapshots;
    c.require(reduced.n_snapshots() == 101, "reduced config snapshot count");
    const double red_lin = linear_eps_xt(reduced.data, 8);
    const PodResult pod = pod_basis(reduced.data, 8);
    FitConfig fit_cfg;
    fit_cfg.r = 8;
    const auto rat = fit_rational_quadratic(reduced.data, pod.basis, fit_cfg, 1);
    const double red_rat =
        reconstruction_error(rat.manifold, reduced.data,
                             pod_coordinates(reduced.data, pod.basis))
            .second;
    c.require(red_rat <= 0.1 * red_lin,
              "rational/linear ratio " + std::to_string(red_rat / red_lin));

    if (std::getenv("ESROM_ACCEPTANCE_FULL")) {
        const PodResult pod15 = pod_basis(snaps.data, 15);
        FitConfig full_cfg;
        full_cfg.r = 15;
        const auto full =
            fit_rational_quadratic(snaps.data, pod15.basis, full_cfg, 1);
        const double eps_rat =
            reconstruction_error(full.manifold, snaps.data,
                                 pod_coordinates(snaps.data, pod15.basis))
                .second;
        std::printf("          [full] rational r=15 eps_xt_max = %.4g\n", eps_rat);
        c.require(eps_rat <= 1e-2,
                  "full rational eps_xt_max = " + std::to_string(eps_rat));
        c.require(eps_rat <= 0.1 * eps_lin, "full rational/linear ratio");
    }
    return c;
}

Check criterion_tse_exactness() {
    Check c;
    std::mt19937 rng(55);
    auto sw = std::make_shared<ShallowWater>(3.0);
    const int N = 20, r = 3;

    // admissible base manifolds of every kind around a positive-height state
    VectorXd shift(2 * N);
    shift.head(N).setConstant(2.0);
    shift.tail(N).setConstant(0.2);

    std::vector<std::shared_ptr<Manifold>> bases;
    bases.push_back(
        std::make_shared<LinearManifold>(0.05 * random_matrix(2 * N, r, rng), shift));
    bases.push_back(std::make_shared<QuadraticManifold>(
        0.05 * random_matrix(2 * N, r, rng), 0.02 * random_matrix(2 * N, 6, rng),
        shift));
    {
        std::vector<MatrixXd> h2(2 * N), chol(2 * N);
        for (int i = 0; i < 2 * N; ++i) {
            const MatrixXd s = 0.02 * random_matrix(r, r, rng);
            h2[i] = 0.5 * (s + s.transpose());
            chol[i] = MatrixXd(
                (0.1 * random_matrix(r, r, rng)).triangularView<Eigen::Lower>());
        }
        bases.push_back(std::make_shared<RationalQuadraticManifold>(
            h2, 0.05 * random_matrix(2 * N, r, rng), shift, chol));
    }

    for (const auto& base : bases) {
        TseManifold tse(base, sw);
        for (int trial = 0; trial < 20 && c.ok; ++trial) {
            const VectorXd a = random_matrix(r, 1, rng);
            VectorXd z(r + 1);
            z << a, 0.01 * trial - 0.05;
            const VectorXd eta = entropy_variables_field(*sw, base->decode(a), N);
            c.require((tse.jacobian(z).col(r) - eta).lpNorm<Eigen::Infinity>() <=
                          1e-14 * (1.0 + eta.lpNorm<Eigen::Infinity>()),
                      "enrichment column deviates from eta");
            VectorXd z0(r + 1);
            z0 << a, 0.0;
            c.require(
                (tse.decode(z0) - base->decode(a)).lpNorm<Eigen::Infinity>() == 0.0,
                "decode at alpha = 0 is not the base decode");
        }
    }

    // Burgers closed form
    auto burgers = std::make_shared<Burgers>();
    auto lin = std::make_shared<LinearManifold>(random_matrix(24, r, rng));
    TseManifold tse(lin, burgers);
    for (int trial = 0; trial < 20 && c.ok; ++trial) {
        const VectorXd a = random_matrix(r, 1, rng);
        const double alpha = 0.05 * trial - 0.4;
        VectorXd z(r + 1);
        z << a, alpha;
        const VectorXd expected = (1.0 + alpha) * lin->decode(a);
        c.require((tse.decode(z) - expected).lpNorm<Eigen::Infinity>() <=
                      1e-15 * (1.0 + expected.lpNorm<Eigen::Infinity>()),
                  "burgers lift is not (1 + alpha) phi(a)");
    }
    return c;
}

Check criterion_euler_projection() {
    Check c;
    auto model = std::make_shared<Euler>(1.4);
    const Grid grid = Grid::uniform(64, 0.0, 1.0, 3);
    const FittedRom rom = fit_rational_rom(model, grid, ic_euler_sod, 2.5e-4, 0.25,
                                           Dissipation::roe1, 8);
    RomConfig cfg;
    cfg.variant = RomVariant::entropy_stable;
    cfg.tse = true;
    cfg.dt = 2.5e-4;
    cfg.t_end = 0.25;
    cfg.dissipation = Dissipation::roe1;
    const RomTrace with_tse = run_rom(*model, grid, *rom.tse, cfg, rom.z0);
    c.require(!with_tse.failed(),
              "TSE run failed at t = " + std::to_string(with_tse.fail_time) + " (" +
                  with_tse.fail_reason + ")");
    if (!c.ok) return c;
    double max_eps = 0.0, max_alpha = 0.0;
    for (double e : with_tse.eps_pi) max_eps = std::max(max_eps, e);
    for (double a : with_tse.alpha) max_alpha = std::max(max_alpha, std::abs(a));
    c.require(max_eps <= 1e-2, "max eps_Pi = " + std::to_string(max_eps));
    c.require(max_alpha <= 1e-2, "max alpha = " + std::to_string(max_alpha));

    RomConfig no_tse = cfg;
    no_tse.tse = false;
    const RomTrace without = run_rom(*model, grid, *rom.base, no_tse, rom.a0);
    if (without.failed()) {
        c.require(without.fail_reason == "inadmissible_projection" ||
                      without.fail_reason == "inadmissible_state",
                  "unexpected failure kind: " + without.fail_reason);
    } else {
        double max_eps_no = 0.0;
        for (double e : without.eps_pi) max_eps_no = std::max(max_eps_no, e);
        c.require(max_eps_no >= 100.0 * max_eps,
                  "no-TSE run neither failed nor degraded (eps_Pi = " +
                      std::to_string(max_eps_no) + ")");
    }
    return c;
}

Check criterion_roundtrip_gradients() {
    Check c;
    std::mt19937 rng(71);
    const std::unique_ptr<ConservationLaw> models[] = {
        std::make_unique<Burgers>(), std::make_unique<ShallowWater>(3.0),
        std::make_unique<Euler>(1.4)};
    for (const auto& model : models) {
        for (int trial = 0; trial < 1000 && c.ok; ++trial) {
            const VectorXd u = random_state(*model, rng);
            const VectorXd back =
                model->entropy_variables_inverse(model->entropy_variables(u));
            c.require((back - u).lpNorm<Eigen::Infinity>() <=
                          1e-12 * (1.0 + u.lpNorm<Eigen::Infinity>()),
                      model->name() + ": round trip above tolerance");
        }
        // gradient check of the entropy variables
        for (int trial = 0; trial < 100 && c.ok; ++trial) {
            const VectorXd u = random_state(*model, rng);
            const VectorXd eta = model->entropy_variables(u);
            for (int k = 0; k < model->n_vars(); ++k) {
                VectorXd up = u, um = u;
                up[k] += 1e-6;
                um[k] -= 1e-6;
                const double fd = (model->entropy(up) - model->entropy(um)) / 2e-6;
                c.require(std::abs(eta[k] - fd) <= 1e-6 * (1.0 + std::abs(eta[k])),
                          model->name() + ": entropy gradient mismatch");
            }
        }
    }
    // manifold jacobians vs finite differences
    auto sw = std::make_shared<ShallowWater>(3.0);
    const int N = 16, r = 3;
    VectorXd shift(2 * N);
    shift.head(N).setConstant(2.0);
    shift.tail(N).setConstant(0.1);
    std::vector<std::shared_ptr<Manifold>> manifolds;
    manifolds.push_back(
        std::make_shared<LinearManifold>(0.1 * random_matrix(2 * N, r, rng), shift));
    manifolds.push_back(std::make_shared<QuadraticManifold>(
        0.1 * random_matrix(2 * N, r, rng), 0.05 * random_matrix(2 * N, 6, rng),
        shift));
    {
        std::vector<MatrixXd> h2(2 * N), chol(2 * N);
        for (int i = 0; i < 2 * N; ++i) {
            const MatrixXd s = 0.05 * random_matrix(r, r, rng);
            h2[i] = 0.5 * (s + s.transpose());
            chol[i] = MatrixXd(
                (0.2 * random_matrix(r, r, rng)).triangularView<Eigen::Lower>());
        }
        manifolds.push_back(std::make_shared<RationalQuadraticManifold>(
            h2, 0.1 * random_matrix(2 * N, r, rng), shift, chol));
    }
    manifolds.push_back(std::make_shared<TseManifold>(manifolds[2], sw));
    for (const auto& m : manifolds) {
        for (int trial = 0; trial < 10 && c.ok; ++trial) {
            const VectorXd a = 0.5 * random_matrix(m->reduced_dim(), 1, rng);
            const MatrixXd J = m->jacobian(a);
            MatrixXd Jfd(m->full_dim(), m->reduced_dim());
            for (int k = 0; k < m->reduced_dim(); ++k) {
                VectorXd ap = a, am = a;
                ap[k] += 1e-6;
                am[k] -= 1e-6;
                Jfd.col(k) = (m->decode(ap) - m->decode(am)) / 2e-6;
            }
            c.require((J - Jfd).lpNorm<Eigen::Infinity>() <=
                          1e-6 * (1.0 + J.lpNorm<Eigen::Infinity>()),
                      "manifold jacobian mismatch");
        }
    }
    return c;
}

Check criterion_linear_special_case() {
    Check c;
    auto model = std::make_shared<Burgers>();
    const Grid grid = Grid::uniform(32, 0.0, 1.0, 1);
    const SnapshotSet snaps =
        run_fom(*model, grid, ic_burgers_sine, 1e-3, 0.2, 5, Dissipation::llf)
            .snapshots;
    // eta-augmented basis (for Burgers the augmentation duplicates the span)
    SnapshotSet aug = augment_snapshots(snaps, *model);
    const MatrixXd phi = omega_orthonormalize(pod_basis(aug.data, 6).basis, grid);
    LinearManifold manifold(phi);

    TangentSolver solver(phi, grid);
    VectorXd a_prod = solver.dagger_apply(snaps.data.col(0));
    VectorXd a_ref = a_prod;

    // independently coded Chan-style linear ES-ROM with an Omega-orthonormal
    // basis: eta_t = Phi Phi^T Om eta, u_t = u(eta_t),
    // da/dt = Phi^T (Dv D(u_t) Di eta_t - Dv f*(u_t))
    const VectorXd w = grid.mass_weight(VectorXd::Ones(grid.n_dof()));
    const MatrixXd omega = w.asDiagonal();
    auto ref_rhs = [&](const VectorXd& a) {
        const VectorXd u_r = phi * a;
        const VectorXd eta_r = entropy_variables_field(*model, u_r, grid.n_cells());
        const VectorXd eta_t = phi * (phi.transpose() * (omega * eta_r));
        const VectorXd u_t =
            entropy_variables_inverse_field(*model, eta_t, grid.n_cells());
        const FluxSplit fluxes =
            assemble_fluxes(*model, grid, u_t, eta_t, Dissipation::llf);
        return (phi.transpose() * (grid.apply_delta_v(fluxes.diss) -
                                   grid.apply_delta_v(fluxes.ec)))
            .eval();
    };
    auto prod_rhs = [&](const VectorXd& a) {
        return rom_rhs(*model, grid, manifold, a, Dissipation::llf,
                       RomVariant::entropy_stable);
    };
    const double dt = 1e-3;
    for (int step = 0; step < 100 && c.ok; ++step) {
        a_prod = rk4_step(a_prod, dt, prod_rhs);
        a_ref = rk4_step(a_ref, dt, ref_rhs);
        c.require((a_prod - a_ref).lpNorm<Eigen::Infinity>() <=
                      1e-12 * (1.0 + a_ref.lpNorm<Eigen::Infinity>()),
                  "trajectories diverged at step " + std::to_string(step + 1));
    }

    // identity decoder: ROM rhs equals the FOM rhs
    ShallowWater sw(3.0);
    const Grid grid2 = Grid::uniform(12, -1.0, 1.0, 2);
    LinearManifold identity(MatrixXd::Identity(24, 24));
    VectorXd u(24);
    for (int i = 0; i < 12; ++i) {
        u[i] = 1.0 + 0.2 * std::sin(kPi * grid2.cell_center(i));
        u[12 + i] = 0.1 * std::cos(kPi * grid2.cell_center(i));
    }
    const VectorXd rom =
        rom_rhs(sw, grid2, identity, u, Dissipation::roe1, RomVariant::generic);
    const VectorXd fom = fom_rhs(sw, grid2, u, Dissipation::roe1);
    c.require((rom - fom).lpNorm<Eigen::Infinity>() <=
                  1e-12 * (1.0 + fom.lpNorm<Eigen::Infinity>()),
              "identity-decoder rhs deviates from the FOM rhs");
    return c;
}

Check criterion_structural() {
    Check c;
    std::mt19937 rng(90);
    // skew-adjointness and zero row/column sums
    for (int trial = 0; trial < 50 && c.ok; ++trial) {
        const Grid grid = Grid::uniform(16 + trial, -1.0, 1.0, 2);
        const VectorXd y = random_matrix(grid.n_dof(), 1, rng);
        const VectorXd z = random_matrix(grid.n_dof(), 1, rng);
        const double lhs = grid.apply_delta_v(y).dot(z);
        const double rhs = y.dot(grid.apply_delta_i(z));
        c.require(std::abs(lhs + rhs) <= 1e-13 * (1.0 + std::abs(lhs)),
                  "skew-adjointness violated");
        c.require(grid.apply_delta_v(VectorXd::Ones(grid.n_dof())).isZero(0.0) &&
                      grid.apply_delta_i(VectorXd::Ones(grid.n_dof())).isZero(0.0),
                  "zero row sums violated");
        for (int k = 0; k < 2; ++k) {
            const int N = grid.n_cells();
            c.require(std::abs(grid.apply_delta_v(y).segment(k * N, N).sum()) <= 1e-12,
                      "zero column sums violated");
        }
    }
    // projector idempotence / self-adjointness
    const Grid grid = Grid::uniform(20, 0.0, 1.0, 2);
    const MatrixXd J = random_matrix(40, 6, rng);
    const TangentSolver solver(J, grid);
    for (int trial = 0; trial < 20 && c.ok; ++trial) {
        const VectorXd x = random_matrix(40, 1, rng);
        const VectorXd z = random_matrix(40, 1, rng);
        const VectorXd px = solver.project(x);
        c.require((solver.project(px) - px).lpNorm<Eigen::Infinity>() <=
                      1e-10 * (1.0 + px.lpNorm<Eigen::Infinity>()),
                  "projector not idempotent");
        c.require(std::abs(grid.weighted_dot(px, z) -
                           grid.weighted_dot(x, solver.project(z))) <=
                      1e-10 * (1.0 + std::abs(grid.weighted_dot(px, z))),
                  "projector not Omega self-adjoint");
    }
    // denominator >= 1 on 1e5 random coordinate samples
    std::vector<MatrixXd> h2(4), chol(4);
    for (int i = 0; i < 4; ++i) {
        const MatrixXd s = random_matrix(4, 4, rng);
        h2[i] = 0.5 * (s + s.transpose());
        chol[i] = MatrixXd(random_matrix(4, 4, rng).triangularView<Eigen::Lower>());
    }
    const RationalQuadraticManifold rat(h2, random_matrix(4, 4, rng),
                                        random_matrix(4, 1, rng), chol);
    std::uniform_real_distribution<double> box(-10.0, 10.0);
    for (int trial = 0; trial < 100000 && c.ok; ++trial) {
        VectorXd a(4);
        for (int k = 0; k < 4; ++k) a[k] = box(rng);
        c.require(rat.denominator(trial % 4, a) >= 1.0, "denominator below one");
    }
    return c;
}

} // namespace

int main() {
    struct Criterion {
        int id;
        const char* label;
        std::function<Check()> run;
    };
    const std::vector<Criterion> criteria = {
        {1, "EC flux identity, consistency, symmetry (1000 pairs per model)",
         criterion_ec_flux},
        {2, "FOM semi-discrete entropy split (Burgers N=64)",
         criterion_fom_semidiscrete},
        {3, "FOM entropy conservation in time (SW smooth, N=128)",
         criterion_fom_entropy_conservation},
        {4, "ES-ROM machine-precision split (SW dam break, N=128, r=8)",
         criterion_esrom_split_dambreak},
        {5, "ES-ROM entropy conservation vs generic (SW smooth, N=128, r=8)",
         criterion_esrom_conservation_smooth},
        {6, "rational manifold accuracy (Burgers full + reduced configs)",
         criterion_manifold_accuracy},
        {7, "TSE exactness across manifold kinds", criterion_tse_exactness},
        {8, "entropy projection accuracy with/without TSE (Euler sod, N=64)",
         criterion_euler_projection},
        {9, "round trips and gradient checks", criterion_roundtrip_gradients},
        {10, "linear special case equivalences", criterion_linear_special_case},
        {11, "structural operator suite", criterion_structural},
    };

    int failures = 0;
    for (const auto& criterion : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Check result;
        try {
            result = criterion.run();
        } catch (const std::exception& e) {
            result.ok = false;
            result.detail = std::string("exception: ") + e.what();
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                .count();
        std::printf("%s  %2d  %-62s (%.1f s)\n", result.ok ? "PASS" : "FAIL",
                    criterion.id, criterion.label, secs);
        if (!result.ok) {
            std::printf("          %s\n", result.detail.c_str());
            ++failures;
        }
        std::fflush(stdout);
    }
    if (failures) std::printf("%d criterion(s) failed\n", failures);
    return failures == 0 ? 0 : 1;
}
