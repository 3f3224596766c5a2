#include "esrom/manifold.hpp"

#include <cmath>

#include <Eigen/Cholesky>

#include "esrom/errors.hpp"

namespace esrom {

void Manifold::check_coords(const Eigen::VectorXd& a) const {
    if (a.size() != reduced_dim())
        throw ContractError("manifold: coordinate vector has length " +
                            std::to_string(a.size()) + ", expected " +
                            std::to_string(reduced_dim()));
    if (!a.allFinite())
        throw ContractError("manifold: non-finite reduced coordinates");
}

// --------------------------------------------------------------------------
// LinearManifold
// --------------------------------------------------------------------------

LinearManifold::LinearManifold(Eigen::MatrixXd basis, Eigen::VectorXd shift)
    : basis_(std::move(basis)), shift_(std::move(shift)) {
    if (basis_.cols() < 1 || basis_.rows() < basis_.cols())
        throw ContractError("linear manifold: basis must be tall N_h x r");
    if (shift_.size() == 0) shift_ = Eigen::VectorXd::Zero(basis_.rows());
    if (shift_.size() != basis_.rows())
        throw ContractError("linear manifold: shift length mismatch");
}

Eigen::VectorXd LinearManifold::decode(const Eigen::VectorXd& a) const {
    check_coords(a);
    return shift_ + basis_ * a;
}

Eigen::MatrixXd LinearManifold::jacobian(const Eigen::VectorXd& a) const {
    check_coords(a);
    return basis_;
}

// --------------------------------------------------------------------------
// QuadraticManifold
// --------------------------------------------------------------------------

QuadraticManifold::QuadraticManifold(Eigen::MatrixXd basis, Eigen::MatrixXd quad_coeffs,
                                     Eigen::VectorXd shift)
    : basis_(std::move(basis)), quad_(std::move(quad_coeffs)), shift_(std::move(shift)) {
    const int r = static_cast<int>(basis_.cols());
    if (quad_.rows() != basis_.rows() || quad_.cols() != feature_count(r))
        throw ContractError("quadratic manifold: coefficient matrix has wrong shape");
    if (shift_.size() != basis_.rows())
        throw ContractError("quadratic manifold: shift length mismatch");
}

Eigen::VectorXd QuadraticManifold::features(const Eigen::VectorXd& a) {
    const int r = static_cast<int>(a.size());
    Eigen::VectorXd k(feature_count(r));
    Eigen::Index idx = 0;
    for (int p = 0; p < r; ++p)
        for (int q = p; q < r; ++q) k[idx++] = a[p] * a[q];
    return k;
}

Eigen::MatrixXd QuadraticManifold::features_jacobian(const Eigen::VectorXd& a) {
    const int r = static_cast<int>(a.size());
    Eigen::MatrixXd dk = Eigen::MatrixXd::Zero(feature_count(r), r);
    Eigen::Index idx = 0;
    for (int p = 0; p < r; ++p)
        for (int q = p; q < r; ++q) {
            dk(idx, p) += a[q];
            dk(idx, q) += a[p];
            ++idx;
        }
    return dk;
}

Eigen::VectorXd QuadraticManifold::decode(const Eigen::VectorXd& a) const {
    check_coords(a);
    return shift_ + basis_ * a + quad_ * features(a);
}

Eigen::MatrixXd QuadraticManifold::jacobian(const Eigen::VectorXd& a) const {
    check_coords(a);
    return basis_ + quad_ * features_jacobian(a);
}

// --------------------------------------------------------------------------
// RationalQuadraticManifold
// --------------------------------------------------------------------------

RationalQuadraticManifold::RationalQuadraticManifold(std::vector<Eigen::MatrixXd> h2,
                                                     Eigen::MatrixXd h1,
                                                     Eigen::VectorXd u_ref,
                                                     std::vector<Eigen::MatrixXd> chol)
    : h2_(std::move(h2)), h1_(std::move(h1)), u_ref_(std::move(u_ref)),
      chol_(std::move(chol)) {
    const Eigen::Index n_rows = u_ref_.size();
    const int r = static_cast<int>(h1_.cols());
    if (h1_.rows() != n_rows ||
        static_cast<Eigen::Index>(h2_.size()) != n_rows ||
        static_cast<Eigen::Index>(chol_.size()) != n_rows)
        throw ContractError("rational manifold: inconsistent slice counts");
    for (const auto& m : h2_)
        if (m.rows() != r || m.cols() != r)
            throw ContractError("rational manifold: H2 slice has wrong shape");
    for (const auto& m : chol_)
        if (m.rows() != r || m.cols() != r)
            throw ContractError("rational manifold: Cholesky slice has wrong shape");
}

double RationalQuadraticManifold::denominator(Eigen::Index row,
                                              const Eigen::VectorXd& a) const {
    return (chol_[row].transpose() * a).squaredNorm() + 1.0;
}

Eigen::VectorXd RationalQuadraticManifold::decode(const Eigen::VectorXd& a) const {
    check_coords(a);
    Eigen::VectorXd out(full_dim());
    for (Eigen::Index i = 0; i < full_dim(); ++i) {
        const double num = a.dot(h2_[i] * a) + h1_.row(i).dot(a) + u_ref_[i];
        out[i] = num / denominator(i, a);
    }
    return out;
}

Eigen::MatrixXd RationalQuadraticManifold::jacobian(const Eigen::VectorXd& a) const {
    check_coords(a);
    Eigen::MatrixXd J(full_dim(), reduced_dim());
    for (Eigen::Index i = 0; i < full_dim(); ++i) {
        const Eigen::VectorXd la = chol_[i].transpose() * a;
        const double d = la.squaredNorm() + 1.0;
        const double num = a.dot(h2_[i] * a) + h1_.row(i).dot(a) + u_ref_[i];
        const Eigen::VectorXd dnum = 2.0 * (h2_[i] * a) + h1_.row(i).transpose();
        const Eigen::VectorXd dden = 2.0 * (chol_[i] * la); // 2 G_i a
        J.row(i) = (dnum / d - (num / (d * d)) * dden).transpose();
    }
    return J;
}

// --------------------------------------------------------------------------
// TseManifold
// --------------------------------------------------------------------------

TseManifold::TseManifold(std::shared_ptr<const Manifold> base,
                         std::shared_ptr<const ConservationLaw> model)
    : base_(std::move(base)), model_(std::move(model)) {
    if (!base_ || !model_) throw ContractError("tse manifold: null base or model");
    if (base_->full_dim() % model_->n_vars() != 0)
        throw ContractError("tse manifold: N_h not divisible by n_vars");
}

Eigen::VectorXd TseManifold::decode(const Eigen::VectorXd& z) const {
    check_coords(z);
    const int r = base_->reduced_dim();
    const Eigen::VectorXd u = base_->decode(z.head(r));
    const double alpha = z[r];
    if (alpha == 0.0) return u; // keep decode(a, 0) == base decode bit-exact
    const Eigen::VectorXd eta = entropy_variables_field(*model_, u, n_cells());
    return u + alpha * eta;
}

Eigen::MatrixXd TseManifold::jacobian(const Eigen::VectorXd& z) const {
    check_coords(z);
    const int r = base_->reduced_dim();
    const int n = model_->n_vars();
    const int N = n_cells();
    const Eigen::VectorXd a = z.head(r);
    const double alpha = z[r];

    const Eigen::VectorXd u = base_->decode(a);
    const Eigen::MatrixXd J = base_->jacobian(a);
    const Eigen::VectorXd eta = entropy_variables_field(*model_, u, N);

    Eigen::MatrixXd Jhat(full_dim(), r + 1);
    Jhat.leftCols(r) = J;
    if (alpha != 0.0) {
        // First r columns: (I + alpha * d eta/du) J with the entropy Hessian
        // applied as per-cell n x n blocks.
        for (int i = 0; i < N; ++i) {
            const Eigen::MatrixXd H =
                model_->entropy_hessian(cell_state(u, n, N, i));
            Eigen::MatrixXd block(n, static_cast<int>(J.cols()));
            for (int k = 0; k < n; ++k)
                block.row(k) = J.row(static_cast<Eigen::Index>(k) * N + i);
            block += alpha * (H * block);
            for (int k = 0; k < n; ++k)
                Jhat.row(static_cast<Eigen::Index>(k) * N + i).head(r) = block.row(k);
        }
    }
    Jhat.col(r) = eta;
    return Jhat;
}

// --------------------------------------------------------------------------
// TangentSolver
// --------------------------------------------------------------------------

TangentSolver::TangentSolver(const Eigen::MatrixXd& jac, const Grid& grid,
                             double cond_limit)
    : jac_(jac), sqrt_w_(grid.sqrt_weights()) {
    if (jac_.rows() != grid.n_dof())
        throw ContractError("tangent solver: J row count != N_h");
    if (jac_.cols() < 1 || jac_.rows() < jac_.cols())
        throw ContractError("tangent solver: J must be tall N_h x r");

    const Eigen::MatrixXd weighted = sqrt_w_.asDiagonal() * jac_;
    qr_.compute(weighted);
    const Eigen::Index r = jac_.cols();
    const double r00 = std::abs(qr_.matrixR()(0, 0));
    const double rkk = std::abs(qr_.matrixR()(r - 1, r - 1));
    cond_ = (rkk > 0.0) ? r00 / rkk : std::numeric_limits<double>::infinity();

    if (!(cond_ <= cond_limit)) {
        use_svd_ = true;
        svd_.compute(weighted, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const double smax = svd_.singularValues()[0];
        const double smin = svd_.singularValues()[r - 1];
        cond_ = (smin > 0.0) ? smax / smin : std::numeric_limits<double>::infinity();
        if (!(smin > smax * 1e-13))
            throw SingularTangentError(
                "tangent space is rank deficient (condition estimate " +
                    std::to_string(cond_) + ")",
                cond_);
    }
}

Eigen::VectorXd TangentSolver::dagger_apply(const Eigen::VectorXd& y) const {
    if (y.size() != jac_.rows())
        throw ContractError("tangent solver: vector length != N_h");
    const Eigen::VectorXd wy = sqrt_w_.cwiseProduct(y);
    if (use_svd_) {
        const Eigen::VectorXd s = svd_.singularValues();
        return svd_.matrixV() *
               (svd_.matrixU().transpose() * wy).cwiseQuotient(s);
    }
    return qr_.solve(wy);
}

Eigen::VectorXd TangentSolver::solve_normal(const Eigen::VectorXd& rhs) const {
    // Solve (J^T Om J) x = rhs via the factorization of Om^{1/2} J.
    if (use_svd_) {
        const Eigen::VectorXd s = svd_.singularValues();
        return svd_.matrixV() *
               (svd_.matrixV().transpose() * rhs).cwiseQuotient(s.cwiseProduct(s));
    }
    const Eigen::Index r = jac_.cols();
    const auto R = qr_.matrixR().topLeftCorner(r, r).triangularView<Eigen::Upper>();
    Eigen::VectorXd z = qr_.colsPermutation().transpose() * rhs;
    R.transpose().solveInPlace(z);
    R.solveInPlace(z);
    return qr_.colsPermutation() * z;
}

Eigen::VectorXd TangentSolver::plus_apply(const Eigen::VectorXd& y) const {
    if (y.size() != jac_.rows())
        throw ContractError("tangent solver: vector length != N_h");
    return solve_normal(jac_.transpose() * y);
}

Eigen::VectorXd TangentSolver::project(const Eigen::VectorXd& y) const {
    return jac_ * dagger_apply(y);
}

Eigen::VectorXd pinv_apply(const Eigen::MatrixXd& jac, const Grid& grid,
                           const Eigen::VectorXd& y) {
    return TangentSolver(jac, grid).dagger_apply(y);
}

Eigen::MatrixXd omega_orthonormalize(const Eigen::MatrixXd& basis, const Grid& grid) {
    if (basis.rows() != grid.n_dof())
        throw ContractError("omega_orthonormalize: basis row count != N_h");
    const Eigen::VectorXd w = grid.mass_weight(Eigen::VectorXd::Ones(grid.n_dof()));
    const Eigen::MatrixXd gram = basis.transpose() * w.asDiagonal() * basis;
    Eigen::LLT<Eigen::MatrixXd> llt(gram);
    if (llt.info() != Eigen::Success)
        throw SingularTangentError("omega_orthonormalize: basis is rank deficient", 0.0);
    // Phi R^{-1} with gram = R^T R.
    const Eigen::MatrixXd R = llt.matrixU();
    return R.triangularView<Eigen::Upper>().solve<Eigen::OnTheRight>(basis);
}

} // namespace esrom
