#include "esrom/physics.hpp"

#include <cmath>
#include <utility>

namespace esrom {

namespace {

Eigen::VectorXd vec1(double a) {
    Eigen::VectorXd v(1);
    v << a;
    return v;
}

Eigen::VectorXd vec2(double a, double b) {
    Eigen::VectorXd v(2);
    v << a, b;
    return v;
}

Eigen::VectorXd vec3(double a, double b, double c) {
    Eigen::VectorXd v(3);
    v << a, b, c;
    return v;
}

} // namespace

std::string to_string(Dissipation d) {
    switch (d) {
        case Dissipation::none: return "none";
        case Dissipation::llf: return "llf";
        case Dissipation::roe1: return "roe1";
        case Dissipation::tecno2_minmod: return "tecno2_minmod";
    }
    return "?";
}

Dissipation dissipation_from_string(const std::string& s) {
    if (s == "none") return Dissipation::none;
    if (s == "llf") return Dissipation::llf;
    if (s == "roe1") return Dissipation::roe1;
    if (s == "tecno2_minmod") return Dissipation::tecno2_minmod;
    throw ConfigError("unknown dissipation operator: " + s);
}

void ConservationLaw::check_state_size(const Eigen::VectorXd& u) const {
    if (u.size() != n_vars())
        throw ContractError(name() + ": state has " + std::to_string(u.size()) +
                            " components, expected " + std::to_string(n_vars()));
}

void ConservationLaw::require_admissible(const Eigen::VectorXd& u, long cell) const {
    check_state_size(u);
    if (!admissible(u)) {
        std::string msg = name() + ": inadmissible state [";
        for (Eigen::Index k = 0; k < u.size(); ++k)
            msg += (k ? ", " : "") + std::to_string(u[k]);
        msg += "]";
        if (cell >= 0) msg += " in cell " + std::to_string(cell);
        throw AdmissibilityError(msg, cell);
    }
}

bool ConservationLaw::supports(Dissipation d) const {
    // Scalar models use llf; systems use the Roe-type operators.
    if (d == Dissipation::none) return true;
    if (d == Dissipation::llf) return n_vars() == 1;
    return n_vars() > 1;
}

void ConservationLaw::scaled_eigen(const Eigen::VectorXd&, Eigen::MatrixXd&,
                                   Eigen::VectorXd&) const {
    throw ContractError(name() + ": no entropy-scaled eigendecomposition implemented");
}

double log_mean(double a, double b) {
    if (!(a > 0.0) || !(b > 0.0))
        throw ContractError("log_mean: arguments must be positive");
    if (a < b) std::swap(a, b); // bit-exact symmetry
    // Ismail-Roe algorithm: series branch for nearly equal arguments. The
    // cubic series is accurate to u^4/9, so the switch point must keep the
    // truncation error below the entropy-conservation tolerances; u < 1e-4
    // gives a relative error ~1e-17.
    const double zeta = a / b;
    const double f = (zeta - 1.0) / (zeta + 1.0);
    const double u = f * f;
    double F;
    if (u < 1e-4)
        F = 1.0 + u / 3.0 + u * u / 5.0 + u * u * u / 7.0;
    else
        F = std::log(zeta) / (2.0 * f);
    return (a + b) / (2.0 * F);
}

double minmod(double a, double b) {
    if (a > 0.0 && b > 0.0) return std::min(a, b);
    if (a < 0.0 && b < 0.0) return std::max(a, b);
    return 0.0;
}

// --------------------------------------------------------------------------
// Burgers
// --------------------------------------------------------------------------

bool Burgers::admissible(const Eigen::VectorXd& u) const {
    return u.size() == 1 && std::isfinite(u[0]);
}

Eigen::VectorXd Burgers::flux(const Eigen::VectorXd& u) const {
    require_admissible(u);
    return vec1(0.5 * u[0] * u[0]);
}

double Burgers::entropy(const Eigen::VectorXd& u) const {
    require_admissible(u);
    return 0.5 * u[0] * u[0];
}

Eigen::VectorXd Burgers::entropy_variables(const Eigen::VectorXd& u) const {
    require_admissible(u);
    return u;
}

bool Burgers::eta_admissible(const Eigen::VectorXd& eta) const {
    return eta.size() == 1 && std::isfinite(eta[0]);
}

Eigen::VectorXd Burgers::entropy_variables_inverse(const Eigen::VectorXd& eta) const {
    if (!eta_admissible(eta))
        throw InadmissibleEntropyError("burgers: non-finite entropy variables");
    return eta;
}

Eigen::MatrixXd Burgers::entropy_hessian(const Eigen::VectorXd& u) const {
    require_admissible(u);
    return Eigen::MatrixXd::Identity(1, 1);
}

double Burgers::flux_potential(const Eigen::VectorXd& u) const {
    require_admissible(u);
    return u[0] * u[0] * u[0] / 6.0;
}

Eigen::VectorXd Burgers::ec_flux(const Eigen::VectorXd& u_l,
                                 const Eigen::VectorXd& u_r) const {
    require_admissible(u_l);
    require_admissible(u_r);
    const double a = u_l[0], b = u_r[0];
    // grouped so that swapping the arguments is bit-exact
    return vec1(((a * a + b * b) + a * b) / 6.0);
}

double Burgers::max_wavespeed(const Eigen::VectorXd& u) const {
    require_admissible(u);
    return std::abs(u[0]);
}

bool Burgers::supports(Dissipation d) const {
    return d == Dissipation::none || d == Dissipation::llf;
}

// --------------------------------------------------------------------------
// Shallow water
// --------------------------------------------------------------------------

ShallowWater::ShallowWater(double gravity) : g_(gravity) {
    if (!(g_ > 0.0)) throw ContractError("shallow_water: gravity must be positive");
}

bool ShallowWater::admissible(const Eigen::VectorXd& u) const {
    return u.size() == 2 && u.allFinite() && u[0] > 0.0;
}

Eigen::VectorXd ShallowWater::flux(const Eigen::VectorXd& u) const {
    require_admissible(u);
    const double h = u[0], hu = u[1];
    return vec2(hu, hu * hu / h + 0.5 * g_ * h * h);
}

double ShallowWater::entropy(const Eigen::VectorXd& u) const {
    require_admissible(u);
    const double h = u[0], hu = u[1];
    return 0.5 * (hu * hu / h + g_ * h * h);
}

Eigen::VectorXd ShallowWater::entropy_variables(const Eigen::VectorXd& u) const {
    require_admissible(u);
    const double h = u[0], v = u[1] / u[0];
    return vec2(g_ * h - 0.5 * v * v, v);
}

bool ShallowWater::eta_admissible(const Eigen::VectorXd& eta) const {
    return eta.size() == 2 && eta.allFinite() &&
           2.0 * eta[0] + eta[1] * eta[1] > 0.0;
}

Eigen::VectorXd ShallowWater::entropy_variables_inverse(const Eigen::VectorXd& eta) const {
    if (!eta_admissible(eta))
        throw InadmissibleEntropyError(
            "shallow_water: entropy variables imply non-positive water height");
    const double h = (2.0 * eta[0] + eta[1] * eta[1]) / (2.0 * g_);
    return vec2(h, h * eta[1]);
}

Eigen::MatrixXd ShallowWater::entropy_hessian(const Eigen::VectorXd& u) const {
    require_admissible(u);
    const double h = u[0], v = u[1] / u[0];
    Eigen::MatrixXd H(2, 2);
    H << g_ + v * v / h, -v / h,
         -v / h, 1.0 / h;
    return H;
}

double ShallowWater::flux_potential(const Eigen::VectorXd& u) const {
    require_admissible(u);
    // psi = eta^T f - F = g h^2 u / 2.
    return 0.5 * g_ * u[0] * u[1];
}

Eigen::VectorXd ShallowWater::ec_flux(const Eigen::VectorXd& u_l,
                                      const Eigen::VectorXd& u_r) const {
    require_admissible(u_l);
    require_admissible(u_r);
    const double hl = u_l[0], hr = u_r[0];
    const double vl = u_l[1] / hl, vr = u_r[1] / hr;
    const double hbar = 0.5 * (hl + hr);
    const double vbar = 0.5 * (vl + vr);
    const double h2bar = 0.5 * (hl * hl + hr * hr);
    return vec2(hbar * vbar, hbar * vbar * vbar + 0.5 * g_ * h2bar);
}

double ShallowWater::max_wavespeed(const Eigen::VectorXd& u) const {
    require_admissible(u);
    return std::abs(u[1] / u[0]) + std::sqrt(g_ * u[0]);
}

void ShallowWater::scaled_eigen(const Eigen::VectorXd& u, Eigen::MatrixXd& R,
                                Eigen::VectorXd& lambda) const {
    require_admissible(u);
    const double h = u[0], v = u[1] / u[0];
    const double c = std::sqrt(g_ * h);
    const double scale = 1.0 / std::sqrt(2.0 * g_);
    R.resize(2, 2);
    R << scale, scale,
         scale * (v - c), scale * (v + c);
    lambda = vec2(v - c, v + c);
}

// --------------------------------------------------------------------------
// Euler
// --------------------------------------------------------------------------

Euler::Euler(double gamma) : gamma_(gamma) {
    if (!(gamma_ > 1.0)) throw ContractError("euler: gamma must exceed 1");
}

double Euler::pressure(const Eigen::VectorXd& u) const {
    return (u[2] - 0.5 * u[1] * u[1] / u[0]) * (gamma_ - 1.0);
}

bool Euler::admissible(const Eigen::VectorXd& u) const {
    return u.size() == 3 && u.allFinite() && u[0] > 0.0 && pressure(u) > 0.0;
}

Eigen::VectorXd Euler::flux(const Eigen::VectorXd& u) const {
    require_admissible(u);
    const double p = pressure(u);
    const double v = u[1] / u[0];
    return vec3(u[1], u[1] * v + p, (u[2] + p) * v);
}

double Euler::entropy(const Eigen::VectorXd& u) const {
    require_admissible(u);
    const double p = pressure(u);
    const double sigma = std::log(p / std::pow(u[0], gamma_));
    return -u[0] * sigma / (gamma_ - 1.0);
}

Eigen::VectorXd Euler::entropy_variables(const Eigen::VectorXd& u) const {
    require_admissible(u);
    const double p = pressure(u);
    const double sigma = std::log(p / std::pow(u[0], gamma_));
    return vec3((gamma_ - sigma) / (gamma_ - 1.0) - 0.5 * u[1] * u[1] / (u[0] * p),
                u[1] / p, -u[0] / p);
}

bool Euler::eta_admissible(const Eigen::VectorXd& eta) const {
    if (eta.size() != 3 || !eta.allFinite()) return false;
    // eta_3 = -rho/p < 0 is the invertibility condition; positive rho and p
    // then follow from the closed form.
    return eta[2] < 0.0;
}

Eigen::VectorXd Euler::entropy_variables_inverse(const Eigen::VectorXd& eta) const {
    if (!eta_admissible(eta))
        throw InadmissibleEntropyError(
            "euler: entropy variables outside the invertible range (eta_3 >= 0)");
    // Derivation-validated form (the round-trip identity is the contract):
    //   beta = rho/p = -eta_3,  v = eta_2/beta,
    //   rho = exp(gamma/(1-gamma) + eta_1 - eta_2^2/(2 eta_3)) * beta^{1/(1-gamma)}.
    const double beta = -eta[2];
    const double v = eta[1] / beta;
    const double q = eta[0] - 0.5 * eta[1] * eta[1] / eta[2];
    const double rho =
        std::exp(gamma_ / (1.0 - gamma_) + q) * std::pow(beta, 1.0 / (1.0 - gamma_));
    const double p = rho / beta;
    if (!(rho > 0.0) || !(p > 0.0) || !std::isfinite(rho) || !std::isfinite(p))
        throw InadmissibleEntropyError("euler: inverse map produced a non-physical state");
    return vec3(rho, rho * v, p / (gamma_ - 1.0) + 0.5 * rho * v * v);
}

Eigen::MatrixXd Euler::entropy_hessian(const Eigen::VectorXd& u) const {
    require_admissible(u);
    const double rho = u[0], v = u[1] / u[0], p = pressure(u);
    const double gm1 = gamma_ - 1.0;
    const double p2 = p * p;
    Eigen::MatrixXd H(3, 3);
    H(0, 0) = 0.25 * gm1 * rho * v * v * v * v / p2 + gamma_ / (rho * gm1);
    H(0, 1) = -0.5 * gm1 * rho * v * v * v / p2;
    H(0, 2) = 0.5 * gm1 * rho * v * v / p2 - 1.0 / p;
    H(1, 1) = gm1 * rho * v * v / p2 + 1.0 / p;
    H(1, 2) = -gm1 * rho * v / p2;
    H(2, 2) = gm1 * rho / p2;
    H(1, 0) = H(0, 1);
    H(2, 0) = H(0, 2);
    H(2, 1) = H(1, 2);
    return H;
}

double Euler::flux_potential(const Eigen::VectorXd& u) const {
    require_admissible(u);
    return u[1]; // psi = rho u
}

Eigen::VectorXd Euler::ec_flux(const Eigen::VectorXd& u_l,
                               const Eigen::VectorXd& u_r) const {
    require_admissible(u_l);
    require_admissible(u_r);
    // Ismail-Roe entropy-conservative flux in the z variables.
    const double pl = pressure(u_l), pr = pressure(u_r);
    const double vl = u_l[1] / u_l[0], vr = u_r[1] / u_r[0];
    const double sl = std::sqrt(u_l[0] / pl), sr = std::sqrt(u_r[0] / pr);
    const double z1l = sl, z2l = sl * vl, z3l = std::sqrt(u_l[0] * pl);
    const double z1r = sr, z2r = sr * vr, z3r = std::sqrt(u_r[0] * pr);
    const double z1b = 0.5 * (z1l + z1r);
    const double z2b = 0.5 * (z2l + z2r);
    const double z3b = 0.5 * (z3l + z3r);
    const double z1ln = log_mean(z1l, z1r);
    const double z3ln = log_mean(z3l, z3r);
    const double F1 = z2b * z3ln;
    const double F2 = z3b / z1b + (z2b / z1b) * F1;
    const double F3 =
        0.5 * (z2b / z1b) * ((gamma_ + 1.0) / (gamma_ - 1.0) * z3ln / z1ln + F2);
    return vec3(F1, F2, F3);
}

double Euler::max_wavespeed(const Eigen::VectorXd& u) const {
    require_admissible(u);
    const double p = pressure(u);
    return std::abs(u[1] / u[0]) + std::sqrt(gamma_ * p / u[0]);
}

void Euler::scaled_eigen(const Eigen::VectorXd& u, Eigen::MatrixXd& R,
                         Eigen::VectorXd& lambda) const {
    require_admissible(u);
    const double rho = u[0], v = u[1] / u[0], p = pressure(u);
    const double c = std::sqrt(gamma_ * p / rho);
    const double H = (u[2] + p) / rho;
    // Right eigenvectors of df/du scaled so that R R^T = du/deta.
    const double sa = std::sqrt(rho / (2.0 * gamma_));
    const double sm = std::sqrt(rho * (gamma_ - 1.0) / gamma_);
    R.resize(3, 3);
    R << sa, sm, sa,
         sa * (v - c), sm * v, sa * (v + c),
         sa * (H - v * c), sm * 0.5 * v * v, sa * (H + v * c);
    lambda = vec3(v - c, v, v + c);
}

// --------------------------------------------------------------------------

std::unique_ptr<ConservationLaw> make_model(const std::string& kind, double sw_gravity,
                                            double euler_gamma) {
    if (kind == "burgers") return std::make_unique<Burgers>();
    if (kind == "shallow_water") return std::make_unique<ShallowWater>(sw_gravity);
    if (kind == "euler") return std::make_unique<Euler>(euler_gamma);
    throw ConfigError("unknown model: " + kind);
}

Eigen::VectorXd dissipation_apply(const ConservationLaw& model,
                                  const Eigen::VectorXd& u_l,
                                  const Eigen::VectorXd& u_r,
                                  const Eigen::VectorXd& delta, Dissipation d) {
    if (!model.supports(d))
        throw ContractError(model.name() + " does not support dissipation " +
                            to_string(d));
    if (delta.size() != model.n_vars())
        throw ContractError("dissipation_apply: jump vector has wrong length");
    switch (d) {
        case Dissipation::none:
            return Eigen::VectorXd::Zero(model.n_vars());
        case Dissipation::llf: {
            model.require_admissible(u_l);
            model.require_admissible(u_r);
            const double a = std::max(model.max_wavespeed(u_l), model.max_wavespeed(u_r));
            return 0.5 * a * delta;
        }
        case Dissipation::roe1: {
            const Eigen::VectorXd u_avg = 0.5 * (u_l + u_r);
            Eigen::MatrixXd R;
            Eigen::VectorXd lam;
            model.scaled_eigen(u_avg, R, lam);
            return 0.5 * R * (lam.cwiseAbs().asDiagonal() * (R.transpose() * delta));
        }
        case Dissipation::tecno2_minmod: {
            // delta is already the reconstructed jump in scaled variables.
            const Eigen::VectorXd u_avg = 0.5 * (u_l + u_r);
            Eigen::MatrixXd R;
            Eigen::VectorXd lam;
            model.scaled_eigen(u_avg, R, lam);
            return 0.5 * R * (lam.cwiseAbs().asDiagonal() * delta);
        }
    }
    throw ContractError("dissipation_apply: unreachable");
}

Eigen::VectorXd cell_state(const Eigen::VectorXd& u_h, int n_vars, int n_cells, int i) {
    Eigen::VectorXd u(n_vars);
    for (int k = 0; k < n_vars; ++k)
        u[k] = u_h[static_cast<Eigen::Index>(k) * n_cells + i];
    return u;
}

void set_cell_state(Eigen::VectorXd& u_h, int n_vars, int n_cells, int i,
                    const Eigen::VectorXd& u) {
    for (int k = 0; k < n_vars; ++k)
        u_h[static_cast<Eigen::Index>(k) * n_cells + i] = u[k];
}

long first_inadmissible_cell(const ConservationLaw& model, const Eigen::VectorXd& u_h,
                             int n_cells) {
    const int n = model.n_vars();
    for (int i = 0; i < n_cells; ++i)
        if (!model.admissible(cell_state(u_h, n, n_cells, i))) return i;
    return -1;
}

Eigen::VectorXd entropy_variables_field(const ConservationLaw& model,
                                        const Eigen::VectorXd& u_h, int n_cells) {
    const int n = model.n_vars();
    Eigen::VectorXd eta_h(u_h.size());
    for (int i = 0; i < n_cells; ++i) {
        const Eigen::VectorXd u = cell_state(u_h, n, n_cells, i);
        model.require_admissible(u, i);
        set_cell_state(eta_h, n, n_cells, i, model.entropy_variables(u));
    }
    return eta_h;
}

Eigen::VectorXd entropy_variables_inverse_field(const ConservationLaw& model,
                                                const Eigen::VectorXd& eta_h,
                                                int n_cells) {
    const int n = model.n_vars();
    Eigen::VectorXd u_h(eta_h.size());
    for (int i = 0; i < n_cells; ++i) {
        const Eigen::VectorXd eta = cell_state(eta_h, n, n_cells, i);
        if (!model.eta_admissible(eta))
            throw InadmissibleProjectionError(
                model.name() + ": projected entropy variables inadmissible in cell " +
                    std::to_string(i),
                i);
        set_cell_state(u_h, n, n_cells, i, model.entropy_variables_inverse(eta));
    }
    return u_h;
}

double total_entropy(const ConservationLaw& model, const Grid& grid,
                     const Eigen::VectorXd& u_h) {
    const int n = model.n_vars();
    const int N = grid.n_cells();
    double S = 0.0;
    for (int i = 0; i < N; ++i)
        S += grid.cell_widths()[i] * model.entropy(cell_state(u_h, n, N, i));
    return S;
}

} // namespace esrom
