#pragma once

#include <memory>
#include <string>

#include <Eigen/Core>

#include "esrom/errors.hpp"
#include "esrom/grid.hpp"

namespace esrom {

/// Interface entropy dissipation operator selector.
enum class Dissipation { none, llf, roe1, tecno2_minmod };

std::string to_string(Dissipation d);
Dissipation dissipation_from_string(const std::string& s);

/// A 1-D hyperbolic conservation law with a convex entropy pair: analytic
/// flux, entropy function and variables, flux potential, entropy-conservative
/// two-point flux and (for systems) the entropy-scaled eigendecomposition
/// used by Roe-type dissipation operators.
///
/// All states are vectors of the n conserved variables of a single cell.
/// Every method is pure; models are immutable and safe to share.
class ConservationLaw {
public:
    virtual ~ConservationLaw() = default;

    virtual int n_vars() const = 0;
    virtual std::string name() const = 0;

    virtual bool admissible(const Eigen::VectorXd& u) const = 0;

    virtual Eigen::VectorXd flux(const Eigen::VectorXd& u) const = 0;

    /// Entropy density s(u).
    virtual double entropy(const Eigen::VectorXd& u) const = 0;

    /// eta(u) = ds/du.
    virtual Eigen::VectorXd entropy_variables(const Eigen::VectorXd& u) const = 0;

    /// Whether eta lies in the invertible range of u(eta).
    virtual bool eta_admissible(const Eigen::VectorXd& eta) const = 0;

    /// Inverse map u(eta); throws InadmissibleEntropyError outside the range.
    virtual Eigen::VectorXd entropy_variables_inverse(const Eigen::VectorXd& eta) const = 0;

    /// d^2 s / du^2, the per-cell entropy Hessian (= d eta / du).
    virtual Eigen::MatrixXd entropy_hessian(const Eigen::VectorXd& u) const = 0;

    /// psi(u) = eta(u)^T f(u) - F(u).
    virtual double flux_potential(const Eigen::VectorXd& u) const = 0;

    /// Entropy-conservative two-point flux: consistent, symmetric, and
    /// (eta_l - eta_r)^T f* = psi_l - psi_r.
    virtual Eigen::VectorXd ec_flux(const Eigen::VectorXd& u_l,
                                    const Eigen::VectorXd& u_r) const = 0;

    /// Spectral radius of df/du at u.
    virtual double max_wavespeed(const Eigen::VectorXd& u) const = 0;

    virtual bool supports(Dissipation d) const;

    /// Entropy-scaled eigendecomposition at u: eigenvalues of df/du in
    /// `lambda` and scaled right eigenvectors R with R R^T = du/deta, so that
    /// R |Lambda| R^T is SPSD in entropy-variable jumps. Systems only.
    virtual void scaled_eigen(const Eigen::VectorXd& u, Eigen::MatrixXd& R,
                              Eigen::VectorXd& lambda) const;

    /// Throws AdmissibilityError (carrying `cell`) when u is inadmissible.
    void require_admissible(const Eigen::VectorXd& u, long cell = -1) const;

protected:
    void check_state_size(const Eigen::VectorXd& u) const;
};

/// Inviscid Burgers equation, entropy s = u^2/2.
class Burgers final : public ConservationLaw {
public:
    int n_vars() const override { return 1; }
    std::string name() const override { return "burgers"; }
    bool admissible(const Eigen::VectorXd& u) const override;
    Eigen::VectorXd flux(const Eigen::VectorXd& u) const override;
    double entropy(const Eigen::VectorXd& u) const override;
    Eigen::VectorXd entropy_variables(const Eigen::VectorXd& u) const override;
    bool eta_admissible(const Eigen::VectorXd& eta) const override;
    Eigen::VectorXd entropy_variables_inverse(const Eigen::VectorXd& eta) const override;
    Eigen::MatrixXd entropy_hessian(const Eigen::VectorXd& u) const override;
    double flux_potential(const Eigen::VectorXd& u) const override;
    Eigen::VectorXd ec_flux(const Eigen::VectorXd& u_l,
                            const Eigen::VectorXd& u_r) const override;
    double max_wavespeed(const Eigen::VectorXd& u) const override;
    bool supports(Dissipation d) const override;
};

/// Shallow water equations (h, hu) with total-energy entropy.
class ShallowWater final : public ConservationLaw {
public:
    explicit ShallowWater(double gravity = 3.0);
    double gravity() const { return g_; }

    int n_vars() const override { return 2; }
    std::string name() const override { return "shallow_water"; }
    bool admissible(const Eigen::VectorXd& u) const override;
    Eigen::VectorXd flux(const Eigen::VectorXd& u) const override;
    double entropy(const Eigen::VectorXd& u) const override;
    Eigen::VectorXd entropy_variables(const Eigen::VectorXd& u) const override;
    bool eta_admissible(const Eigen::VectorXd& eta) const override;
    Eigen::VectorXd entropy_variables_inverse(const Eigen::VectorXd& eta) const override;
    Eigen::MatrixXd entropy_hessian(const Eigen::VectorXd& u) const override;
    double flux_potential(const Eigen::VectorXd& u) const override;
    Eigen::VectorXd ec_flux(const Eigen::VectorXd& u_l,
                            const Eigen::VectorXd& u_r) const override;
    double max_wavespeed(const Eigen::VectorXd& u) const override;
    void scaled_eigen(const Eigen::VectorXd& u, Eigen::MatrixXd& R,
                      Eigen::VectorXd& lambda) const override;

private:
    double g_;
};

/// Compressible Euler equations (rho, rho u, E), ideal gas, entropy
/// s = -rho sigma/(gamma-1) with sigma = ln(p/rho^gamma).
class Euler final : public ConservationLaw {
public:
    explicit Euler(double gamma = 1.4);
    double gamma() const { return gamma_; }

    double pressure(const Eigen::VectorXd& u) const;

    int n_vars() const override { return 3; }
    std::string name() const override { return "euler"; }
    bool admissible(const Eigen::VectorXd& u) const override;
    Eigen::VectorXd flux(const Eigen::VectorXd& u) const override;
    double entropy(const Eigen::VectorXd& u) const override;
    Eigen::VectorXd entropy_variables(const Eigen::VectorXd& u) const override;
    bool eta_admissible(const Eigen::VectorXd& eta) const override;
    Eigen::VectorXd entropy_variables_inverse(const Eigen::VectorXd& eta) const override;
    Eigen::MatrixXd entropy_hessian(const Eigen::VectorXd& u) const override;
    double flux_potential(const Eigen::VectorXd& u) const override;
    Eigen::VectorXd ec_flux(const Eigen::VectorXd& u_l,
                            const Eigen::VectorXd& u_r) const override;
    double max_wavespeed(const Eigen::VectorXd& u) const override;
    void scaled_eigen(const Eigen::VectorXd& u, Eigen::MatrixXd& R,
                      Eigen::VectorXd& lambda) const override;

private:
    double gamma_;
};

std::unique_ptr<ConservationLaw> make_model(const std::string& kind,
                                            double sw_gravity = 3.0,
                                            double euler_gamma = 1.4);

/// Logarithmic mean (a - b)/(ln a - ln b) with a series branch for nearly
/// equal arguments.
double log_mean(double a, double b);

/// sign(a) min(|a|,|b|) when signs agree, else 0.
double minmod(double a, double b);

/// Apply the interface dissipation operator to a jump vector, including the
/// conventional 1/2 of flux-differencing schemes: llf is (1/2) max(|u|) delta
/// (the classical local Lax-Friedrichs flux) and roe1 is (1/2) R |Lambda| R^T
/// delta with entropy-scaled eigenvectors.
///
/// `delta` is the entropy-variable jump eta_r - eta_l for none/llf/roe1. For
/// tecno2_minmod it is the minmod-reconstructed jump in scaled entropy
/// variables w = R^T eta, on which (1/2) R |Lambda| acts directly.
Eigen::VectorXd dissipation_apply(const ConservationLaw& model,
                                  const Eigen::VectorXd& u_l,
                                  const Eigen::VectorXd& u_r,
                                  const Eigen::VectorXd& delta,
                                  Dissipation d);

// --- field helpers (variable-major layout over N cells) --------------------

/// Extract the conserved state of cell i from a length-N_h field.
Eigen::VectorXd cell_state(const Eigen::VectorXd& u_h, int n_vars, int n_cells, int i);

void set_cell_state(Eigen::VectorXd& u_h, int n_vars, int n_cells, int i,
                    const Eigen::VectorXd& u);

/// Index of the first inadmissible cell, or -1 when all are admissible.
long first_inadmissible_cell(const ConservationLaw& model, const Eigen::VectorXd& u_h,
                             int n_cells);

/// eta applied cell-wise to a length-N_h field.
Eigen::VectorXd entropy_variables_field(const ConservationLaw& model,
                                        const Eigen::VectorXd& u_h, int n_cells);

/// u(eta) applied cell-wise; throws InadmissibleProjectionError with the
/// failing cell when a cell's entropy variables leave the invertible range.
Eigen::VectorXd entropy_variables_inverse_field(const ConservationLaw& model,
                                                const Eigen::VectorXd& eta_h,
                                                int n_cells);

/// Discrete total entropy S_h = sum_i dx_i s(u_i).
double total_entropy(const ConservationLaw& model, const Grid& grid,
                     const Eigen::VectorXd& u_h);

} // namespace esrom
