#include "esrom/fitting.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include <Eigen/Cholesky>
#include <Eigen/SVD>

#include "esrom/errors.hpp"

namespace esrom {

PodResult pod_basis(const Eigen::MatrixXd& X, int r) {
    if (r < 1 || r > std::min(X.rows(), X.cols()))
        throw ContractError("pod_basis: r out of range");
    Eigen::BDCSVD<Eigen::MatrixXd> svd(X, Eigen::ComputeThinU);
    PodResult out;
    out.basis = svd.matrixU().leftCols(r);
    out.singular_values = svd.singularValues();
    return out;
}

Eigen::MatrixXd pod_coordinates(const Eigen::MatrixXd& X, const Eigen::MatrixXd& basis) {
    if (basis.rows() != X.rows())
        throw ContractError("pod_coordinates: basis/data row mismatch");
    return (basis.transpose() * X).transpose();
}

SnapshotSet augment_snapshots(const SnapshotSet& snaps, const ConservationLaw& model) {
    const int n_s = snaps.n_snapshots();
    if (n_s < 1) throw ContractError("augment_snapshots: empty snapshot set");
    SnapshotSet out = snaps;
    out.data.resize(snaps.data.rows(), 2 * n_s);
    out.times.resize(2 * n_s);
    out.data.leftCols(n_s) = snaps.data;
    out.times.head(n_s) = snaps.times;
    for (int j = 0; j < n_s; ++j) {
        out.data.col(n_s + j) =
            entropy_variables_field(model, snaps.data.col(j), snaps.n_cells);
        out.times[n_s + j] = snaps.times[j];
    }
    return out;
}

QuadraticManifold fit_quadratic(const Eigen::MatrixXd& X, const Eigen::MatrixXd& basis,
                                double lambda) {
    if (basis.rows() != X.rows())
        throw ContractError("fit_quadratic: basis/data row mismatch");
    if (lambda < 0.0) throw ContractError("fit_quadratic: lambda must be >= 0");
    const int n_s = static_cast<int>(X.cols());
    const int r = static_cast<int>(basis.cols());
    const Eigen::Index n_feat = QuadraticManifold::feature_count(r);

    // The first snapshot is the reference shift, so the reference state has
    // coordinates zero and decode(0) reproduces it exactly.
    const Eigen::VectorXd shift = X.col(0);
    const Eigen::MatrixXd Xc = X.colwise() - shift;
    const Eigen::MatrixXd A = (basis.transpose() * Xc).transpose(); // n_s x r
    const Eigen::MatrixXd resid = Xc - basis * A.transpose();

    Eigen::MatrixXd K(n_feat, n_s);
    for (int j = 0; j < n_s; ++j)
        K.col(j) = QuadraticManifold::features(A.row(j).transpose());

    // Ridge normal equations, shared across rows.
    Eigen::MatrixXd gram = K * K.transpose();
    gram.diagonal().array() += lambda;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
    const Eigen::MatrixXd W = ldlt.solve(K * resid.transpose()).transpose();
    return QuadraticManifold(basis, W, shift);
}

std::pair<Eigen::MatrixXd, double> reconstruction_error(const Manifold& manifold,
                                                        const Eigen::MatrixXd& X,
                                                        const Eigen::MatrixXd& A) {
    if (A.rows() != X.cols())
        throw ContractError("reconstruction_error: coordinate row count != n_s");
    if (manifold.full_dim() != X.rows())
        throw ContractError("reconstruction_error: manifold/data dimension mismatch");
    Eigen::MatrixXd eps(X.rows(), X.cols());
    for (Eigen::Index j = 0; j < X.cols(); ++j)
        eps.col(j) = manifold.decode(A.row(j).transpose()) - X.col(j);
    return {eps, eps.cwiseAbs().maxCoeff()};
}

namespace detail {

Eigen::MatrixXd RationalRowModel::unpack_sym(const Eigen::VectorXd& theta) const {
    Eigen::MatrixXd H(r, r);
    Eigen::Index idx = 0;
    for (int p = 0; p < r; ++p)
        for (int q = p; q < r; ++q) {
            H(p, q) = theta[idx];
            H(q, p) = theta[idx];
            ++idx;
        }
    return H;
}

Eigen::MatrixXd RationalRowModel::unpack_lower(const Eigen::VectorXd& theta) const {
    Eigen::MatrixXd L = Eigen::MatrixXd::Zero(r, r);
    Eigen::Index idx = l_offset();
    for (int p = 0; p < r; ++p)
        for (int q = 0; q <= p; ++q) L(p, q) = theta[idx++];
    return L;
}

Eigen::VectorXd RationalRowModel::predict(const Eigen::MatrixXd& A,
                                          const Eigen::VectorXd& theta) const {
    const Eigen::MatrixXd H = unpack_sym(theta);
    const Eigen::VectorXd h = theta.segment(h_offset(), r);
    const double u = theta[u_offset()];
    const Eigen::MatrixXd L = unpack_lower(theta);

    const Eigen::MatrixXd AH = A * H;
    const Eigen::MatrixXd AL = A * L;
    const Eigen::VectorXd num =
        AH.cwiseProduct(A).rowwise().sum() + A * h +
        Eigen::VectorXd::Constant(A.rows(), u);
    const Eigen::VectorXd den =
        AL.cwiseProduct(AL).rowwise().sum() + Eigen::VectorXd::Ones(A.rows());
    return num.cwiseQuotient(den);
}

void RationalRowModel::residual_jacobian(const Eigen::MatrixXd& A,
                                         const Eigen::VectorXd& y,
                                         const Eigen::VectorXd& theta,
                                         Eigen::VectorXd& res,
                                         Eigen::MatrixXd& jac) const {
    const Eigen::Index n_s = A.rows();
    const Eigen::MatrixXd H = unpack_sym(theta);
    const Eigen::VectorXd h = theta.segment(h_offset(), r);
    const double u = theta[u_offset()];
    const Eigen::MatrixXd L = unpack_lower(theta);

    const Eigen::MatrixXd AL = A * L; // row j = L^T a_j
    const Eigen::VectorXd num = (A * H).cwiseProduct(A).rowwise().sum() + A * h +
                                Eigen::VectorXd::Constant(n_s, u);
    const Eigen::VectorXd den =
        AL.cwiseProduct(AL).rowwise().sum() + Eigen::VectorXd::Ones(n_s);

    res = y - num.cwiseQuotient(den);
    jac.resize(n_s, n_params());

    // res_j = y_j - num_j/den_j, so d res/d theta = -(d num/d theta)/den
    // + num/den^2 * (d den/d theta).
    const Eigen::VectorXd inv_den = den.cwiseInverse();
    const Eigen::VectorXd num_den2 = num.cwiseProduct(inv_den).cwiseProduct(inv_den);

    Eigen::Index idx = 0;
    for (int p = 0; p < r; ++p)
        for (int q = p; q < r; ++q) {
            const double fac = (p == q) ? 1.0 : 2.0;
            jac.col(idx++) =
                -fac * A.col(p).cwiseProduct(A.col(q)).cwiseProduct(inv_den);
        }
    for (int p = 0; p < r; ++p)
        jac.col(idx++) = -A.col(p).cwiseProduct(inv_den);
    jac.col(idx++) = -inv_den;
    // d den/d L_pq = 2 (L^T a)_q a_p.
    for (int p = 0; p < r; ++p)
        for (int q = 0; q <= p; ++q)
            jac.col(idx++) =
                2.0 * AL.col(q).cwiseProduct(A.col(p)).cwiseProduct(num_den2);
}

LmOutcome lm_fit_row(const RationalRowModel& model, const Eigen::MatrixXd& A,
                     const Eigen::VectorXd& y, const Eigen::VectorXd& theta0,
                     const LmOptions& opts) {
    LmOutcome out;
    out.theta = theta0;

    Eigen::VectorXd res;
    Eigen::MatrixXd jac;
    model.residual_jacobian(A, y, out.theta, res, jac);
    double cost = res.squaredNorm();
    double damping = opts.initial_damping;

    for (out.iters = 0; out.iters < opts.max_iters; ++out.iters) {
        const Eigen::MatrixXd jtj = jac.transpose() * jac;
        const Eigen::VectorXd g = jac.transpose() * res;
        if (g.lpNorm<Eigen::Infinity>() <= opts.gradient_tol) {
            out.converged = true;
            break;
        }

        bool accepted = false;
        for (int tries = 0; tries < 25; ++tries) {
            Eigen::MatrixXd lhs = jtj;
            // Marquardt scaling keeps the step well-conditioned across the
            // widely different magnitudes of the packed parameters.
            lhs.diagonal() +=
                damping * jtj.diagonal().cwiseMax(1e-12).matrix();
            const Eigen::VectorXd step = -Eigen::LDLT<Eigen::MatrixXd>(lhs).solve(g);
            if (!step.allFinite()) {
                damping *= 10.0;
                continue;
            }
            const Eigen::VectorXd cand = out.theta + step;
            Eigen::VectorXd cand_res;
            Eigen::MatrixXd cand_jac;
            model.residual_jacobian(A, y, cand, cand_res, cand_jac);
            const double cand_cost = cand_res.squaredNorm();
            if (std::isfinite(cand_cost) && cand_cost < cost) {
                const double step_size = step.norm();
                out.theta = cand;
                res.swap(cand_res);
                jac.swap(cand_jac);
                cost = cand_cost;
                damping = std::max(damping / 10.0, 1e-14);
                accepted = true;
                if (step_size <= opts.step_tol * (out.theta.norm() + opts.step_tol))
                    out.converged = true;
                break;
            }
            damping *= 10.0;
        }
        if (!accepted || out.converged) break; // stalled or step-tol reached
    }
    out.residual_norm = std::sqrt(cost);
    if (!std::isfinite(out.residual_norm)) out.converged = false;
    return out;
}

} // namespace detail

namespace {

// Inter-sample oscillation guard used when selecting among fit candidates:
// the row function evaluated at midpoints of consecutive snapshot
// coordinates must stay inside the local data range (plus slack). Monotone
// steep transitions pass untouched; candidates that only reach a low data
// residual by oscillating between samples are penalized. Overfitted rows
// like that reconstruct the snapshots well but wreck the manifold between
// them, where the ROM trajectory lives.
double overshoot_penalty(const detail::RationalRowModel& model,
                         const Eigen::MatrixXd& A, const Eigen::VectorXd& y,
                         const Eigen::VectorXd& theta) {
    const Eigen::Index n_s = A.rows();
    if (n_s < 2) return 0.0;
    Eigen::MatrixXd mids(n_s - 1, A.cols());
    for (Eigen::Index j = 0; j + 1 < n_s; ++j)
        mids.row(j) = 0.5 * (A.row(j) + A.row(j + 1));
    const Eigen::VectorXd vals = model.predict(mids, theta);
    const double slack = 0.05 * (y.maxCoeff() - y.minCoeff()) + 1e-12;
    double penalty = 0.0;
    for (Eigen::Index j = 0; j + 1 < n_s; ++j) {
        const double lo = std::min(y[j], y[j + 1]) - slack;
        const double hi = std::max(y[j], y[j + 1]) + slack;
        if (vals[j] > hi) penalty += (vals[j] - hi) * (vals[j] - hi);
        if (vals[j] < lo) penalty += (lo - vals[j]) * (lo - vals[j]);
    }
    return penalty;
}

// Linear least squares fallback for a row: quadratic numerator, denominator
// fixed at 1 (L = 0). Small ridge keeps collinear feature sets solvable.
Eigen::VectorXd fallback_row_fit(const detail::RationalRowModel& model,
                                 const Eigen::MatrixXd& A, const Eigen::VectorXd& y) {
    const Eigen::Index n_s = A.rows();
    const Eigen::Index n_lin = model.u_offset() + 1;
    Eigen::MatrixXd B(n_s, n_lin);
    Eigen::Index idx = 0;
    for (int p = 0; p < model.r; ++p)
        for (int q = p; q < model.r; ++q) {
            const double fac = (p == q) ? 1.0 : 2.0;
            B.col(idx++) = fac * A.col(p).cwiseProduct(A.col(q));
        }
    for (int p = 0; p < model.r; ++p) B.col(idx++) = A.col(p);
    B.col(idx++) = Eigen::VectorXd::Ones(n_s);

    Eigen::MatrixXd gram = B.transpose() * B;
    gram.diagonal().array() += 1e-10;
    const Eigen::VectorXd w = Eigen::LDLT<Eigen::MatrixXd>(gram).solve(B.transpose() * y);

    Eigen::VectorXd theta = Eigen::VectorXd::Zero(model.n_params());
    theta.head(n_lin) = w;
    return theta;
}

Eigen::VectorXd ones_initial_guess(const detail::RationalRowModel& model,
                                   double row_mean) {
    Eigen::VectorXd theta = Eigen::VectorXd::Ones(model.n_params());
    theta[model.u_offset()] = row_mean;
    return theta;
}

} // namespace

RationalFitResult fit_rational_quadratic(const Eigen::MatrixXd& X,
                                         const Eigen::MatrixXd& basis,
                                         const FitConfig& config, int n_vars) {
    if (basis.rows() != X.rows())
        throw ContractError("fit_rational_quadratic: basis/data row mismatch");
    if (X.rows() % n_vars != 0)
        throw ContractError("fit_rational_quadratic: N_h not divisible by n_vars");
    if (config.lm.max_iters < 1 || !(config.lm.gradient_tol > 0.0) ||
        !(config.lm.step_tol > 0.0) || !(config.lm.initial_damping > 0.0))
        throw ContractError("fit_rational_quadratic: invalid LM options");

    const Eigen::Index n_rows = X.rows();
    const int r = static_cast<int>(basis.cols());
    const Eigen::Index cells_per_var = n_rows / n_vars;
    const Eigen::MatrixXd A = pod_coordinates(X, basis);

    detail::RationalRowModel row_model{r};
    std::vector<Eigen::VectorXd> thetas(n_rows);
    std::vector<RowFitInfo> report(n_rows);
    std::vector<double> scores(n_rows,
                               std::numeric_limits<double>::infinity());

    const bool sequential = config.parallel_rows <= 1;
    const bool warm = config.warm_start && sequential;

    // Candidates are ranked by the guarded score: data residual plus the
    // inter-sample overshoot penalty.
    auto guarded_score = [&](const Eigen::VectorXd& y, const detail::LmOutcome& lm) {
        return std::sqrt(lm.residual_norm * lm.residual_norm +
                         overshoot_penalty(row_model, A, y, lm.theta));
    };

    auto fit_row = [&](Eigen::Index i, const Eigen::VectorXd* warm_theta) {
        const Eigen::VectorXd y = X.row(i).transpose();

        // Multi-start: the warm start (previous row, same variable), the
        // all-ones guess, and the closed-form quadratic-numerator solution.
        // The latter makes the fit at least as accurate as the nested
        // quadratic model, since accepted LM steps never increase the
        // residual.
        std::vector<Eigen::VectorXd> starts;
        if (warm_theta) starts.push_back(*warm_theta);
        starts.push_back(ones_initial_guess(row_model, y.mean()));
        starts.push_back(fallback_row_fit(row_model, A, y));

        detail::LmOutcome best;
        double best_score = std::numeric_limits<double>::infinity();
        int total_iters = 0;
        for (const auto& theta0 : starts) {
            const detail::LmOutcome lm =
                detail::lm_fit_row(row_model, A, y, theta0, config.lm);
            total_iters += lm.iters;
            if (!std::isfinite(lm.residual_norm)) continue;
            const double score = guarded_score(y, lm);
            if (score < best_score) {
                best_score = score;
                best = lm;
            }
        }

        RowFitInfo info;
        info.row = static_cast<int>(i);
        info.iters = total_iters;
        info.fallback = !std::isfinite(best_score);
        if (info.fallback) {
            best.theta = fallback_row_fit(row_model, A, y);
            best.residual_norm = (y - row_model.predict(A, best.theta)).norm();
            best_score = guarded_score(y, best);
        }
        info.residual = best.residual_norm;
        thetas[i] = best.theta;
        scores[i] = best_score;
        report[i] = info;
    };

    if (sequential) {
        for (Eigen::Index i = 0; i < n_rows; ++i) {
            const bool same_var = warm && (i % cells_per_var != 0);
            fit_row(i, same_var ? &thetas[i - 1] : nullptr);
        }
    } else {
        const int n_threads = config.parallel_rows;
        std::vector<std::thread> pool;
        std::atomic<Eigen::Index> next{0};
        for (int t = 0; t < n_threads; ++t)
            pool.emplace_back([&] {
                for (Eigen::Index i = next.fetch_add(1); i < n_rows;
                     i = next.fetch_add(1))
                    fit_row(i, nullptr);
            });
        for (auto& th : pool) th.join();
    }

    // Neighbor refinement sweeps: rows tracking a moving front can sit in a
    // different local minimum than their spatial neighbors; re-running LM
    // warm-started from the fitted neighbor (backward, then forward) and
    // keeping improvements sharpens exactly those rows. The sweeps run
    // sequentially in a fixed order, so results stay deterministic in both
    // fitting modes.
    auto refine_from_neighbor = [&](Eigen::Index i, Eigen::Index neighbor) {
        if (i / cells_per_var != neighbor / cells_per_var) return;
        const Eigen::VectorXd y = X.row(i).transpose();
        const detail::LmOutcome lm =
            detail::lm_fit_row(row_model, A, y, thetas[neighbor], config.lm);
        report[i].iters += lm.iters;
        if (!std::isfinite(lm.residual_norm)) return;
        const double score = guarded_score(y, lm);
        if (score < scores[i]) {
            thetas[i] = lm.theta;
            scores[i] = score;
            report[i].residual = lm.residual_norm;
            report[i].fallback = false;
        }
    };
    for (Eigen::Index i = n_rows - 2; i >= 0; --i) refine_from_neighbor(i, i + 1);
    for (Eigen::Index i = 1; i < n_rows; ++i) refine_from_neighbor(i, i - 1);

    std::vector<Eigen::MatrixXd> h2(n_rows), chol(n_rows);
    Eigen::MatrixXd h1(n_rows, r);
    Eigen::VectorXd u_ref(n_rows);
    for (Eigen::Index i = 0; i < n_rows; ++i) {
        h2[i] = row_model.unpack_sym(thetas[i]);
        h1.row(i) = thetas[i].segment(row_model.h_offset(), r).transpose();
        u_ref[i] = thetas[i][row_model.u_offset()];
        chol[i] = row_model.unpack_lower(thetas[i]);
    }
    return {RationalQuadraticManifold(std::move(h2), std::move(h1), std::move(u_ref),
                                      std::move(chol)),
            std::move(report)};
}

} // namespace esrom
