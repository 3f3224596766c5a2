#pragma once

#include <memory>
#include <vector>

#include <Eigen/Core>
#include <Eigen/QR>
#include <Eigen/SVD>

#include "esrom/grid.hpp"
#include "esrom/physics.hpp"

namespace esrom {

/// Decoder phi : R^r -> R^{N_h} with Jacobian, parameterizing a reduced
/// manifold embedded in the FOM state space.
class Manifold {
public:
    virtual ~Manifold() = default;

    virtual Eigen::Index full_dim() const = 0;
    virtual int reduced_dim() const = 0;
    virtual Eigen::VectorXd decode(const Eigen::VectorXd& a) const = 0;
    virtual Eigen::MatrixXd jacobian(const Eigen::VectorXd& a) const = 0;

protected:
    void check_coords(const Eigen::VectorXd& a) const;
};

/// Affine decoder u = shift + Phi a.
class LinearManifold final : public Manifold {
public:
    explicit LinearManifold(Eigen::MatrixXd basis,
                            Eigen::VectorXd shift = Eigen::VectorXd());

    const Eigen::MatrixXd& basis() const { return basis_; }
    const Eigen::VectorXd& shift() const { return shift_; }

    Eigen::Index full_dim() const override { return basis_.rows(); }
    int reduced_dim() const override { return static_cast<int>(basis_.cols()); }
    Eigen::VectorXd decode(const Eigen::VectorXd& a) const override;
    Eigen::MatrixXd jacobian(const Eigen::VectorXd& a) const override;

private:
    Eigen::MatrixXd basis_;
    Eigen::VectorXd shift_;
};

/// Quadratic decoder u = shift + Phi a + W k(a) with k the half-vectorized
/// symmetric quadratic feature map.
class QuadraticManifold final : public Manifold {
public:
    QuadraticManifold(Eigen::MatrixXd basis, Eigen::MatrixXd quad_coeffs,
                      Eigen::VectorXd shift);

    static Eigen::Index feature_count(int r) {
        return static_cast<Eigen::Index>(r) * (r + 1) / 2;
    }
    /// k(a) = [a_p a_q]_{p<=q}.
    static Eigen::VectorXd features(const Eigen::VectorXd& a);
    /// dk/da.
    static Eigen::MatrixXd features_jacobian(const Eigen::VectorXd& a);

    const Eigen::MatrixXd& basis() const { return basis_; }
    const Eigen::MatrixXd& quad_coeffs() const { return quad_; }
    const Eigen::VectorXd& shift() const { return shift_; }

    Eigen::Index full_dim() const override { return basis_.rows(); }
    int reduced_dim() const override { return static_cast<int>(basis_.cols()); }
    Eigen::VectorXd decode(const Eigen::VectorXd& a) const override;
    Eigen::MatrixXd jacobian(const Eigen::VectorXd& a) const override;

private:
    Eigen::MatrixXd basis_;
    Eigen::MatrixXd quad_;
    Eigen::VectorXd shift_;
};

/// Pole-free rational quadratic decoder. Row i evaluates
///   (a^T H2_i a + H1_i a + u_ref_i) / (a^T G_i a + 1),  G_i = L_i L_i^T,
/// with symmetric H2_i and lower-triangular Cholesky factors L_i stored as
/// the source of truth, so every denominator is >= 1 for all real a.
class RationalQuadraticManifold final : public Manifold {
public:
    RationalQuadraticManifold(std::vector<Eigen::MatrixXd> h2, Eigen::MatrixXd h1,
                              Eigen::VectorXd u_ref,
                              std::vector<Eigen::MatrixXd> chol);

    const std::vector<Eigen::MatrixXd>& h2() const { return h2_; }
    const Eigen::MatrixXd& h1() const { return h1_; }
    const Eigen::VectorXd& u_ref() const { return u_ref_; }
    const std::vector<Eigen::MatrixXd>& chol() const { return chol_; }

    double denominator(Eigen::Index row, const Eigen::VectorXd& a) const;

    Eigen::Index full_dim() const override { return u_ref_.size(); }
    int reduced_dim() const override { return static_cast<int>(h1_.cols()); }
    Eigen::VectorXd decode(const Eigen::VectorXd& a) const override;
    Eigen::MatrixXd jacobian(const Eigen::VectorXd& a) const override;

private:
    std::vector<Eigen::MatrixXd> h2_;
    Eigen::MatrixXd h1_;
    Eigen::VectorXd u_ref_;
    std::vector<Eigen::MatrixXd> chol_;
};

/// Tangent space enrichment: lifts a base manifold along the local entropy
/// variables, phi_hat(a, alpha) = phi(a) + eta(phi(a)) alpha. Coordinates are
/// [a; alpha]; the enriched Jacobian's last column is exactly eta(phi(a)).
class TseManifold final : public Manifold {
public:
    TseManifold(std::shared_ptr<const Manifold> base,
                std::shared_ptr<const ConservationLaw> model);

    const Manifold& base() const { return *base_; }

    Eigen::Index full_dim() const override { return base_->full_dim(); }
    int reduced_dim() const override { return base_->reduced_dim() + 1; }
    Eigen::VectorXd decode(const Eigen::VectorXd& z) const override;
    Eigen::MatrixXd jacobian(const Eigen::VectorXd& z) const override;

private:
    int n_cells() const {
        return static_cast<int>(base_->full_dim()) / model_->n_vars();
    }

    std::shared_ptr<const Manifold> base_;
    std::shared_ptr<const ConservationLaw> model_;
};

/// Omega_h-weighted pseudo-inverse of a tangent-space basis J, factored once
/// per evaluation point. Solves via QR of Omega^{1/2} J with an SVD fallback
/// for ill-conditioned tangent spaces; throws SingularTangentError when J
/// loses full column rank.
class TangentSolver {
public:
    TangentSolver(const Eigen::MatrixXd& jac, const Grid& grid,
                  double cond_limit = 1e12);

    /// J^dagger y = (J^T Om J)^{-1} J^T Om y.
    Eigen::VectorXd dagger_apply(const Eigen::VectorXd& y) const;

    /// J^+ y = (J^T Om J)^{-1} J^T y.
    Eigen::VectorXd plus_apply(const Eigen::VectorXd& y) const;

    /// Omega-orthogonal projection J J^dagger y onto span(J).
    Eigen::VectorXd project(const Eigen::VectorXd& y) const;

    double condition_estimate() const { return cond_; }

private:
    Eigen::VectorXd solve_normal(const Eigen::VectorXd& rhs) const;

    Eigen::MatrixXd jac_;
    Eigen::VectorXd sqrt_w_;
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr_;
    Eigen::BDCSVD<Eigen::MatrixXd> svd_;
    bool use_svd_ = false;
    double cond_ = 0.0;
};

/// One-shot J^dagger y.
Eigen::VectorXd pinv_apply(const Eigen::MatrixXd& jac, const Grid& grid,
                           const Eigen::VectorXd& y);

/// Re-orthonormalize basis columns in the Omega_h inner product.
Eigen::MatrixXd omega_orthonormalize(const Eigen::MatrixXd& basis, const Grid& grid);

} // namespace esrom
