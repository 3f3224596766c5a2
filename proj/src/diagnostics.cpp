#include "esrom/diagnostics.hpp"

#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "esrom/errors.hpp"
#include "esrom/fitting.hpp"
#include "esrom/io.hpp"

namespace esrom {

double eps_u(const Eigen::VectorXd& u_fom, const Eigen::VectorXd& u_rom,
             const Grid& grid) {
    if (u_fom.size() != u_rom.size())
        throw ContractError("eps_u: vector length mismatch");
    return grid.weighted_norm(u_fom - u_rom);
}

double eps_proj(const Eigen::VectorXd& u_fom, const Eigen::MatrixXd& basis,
                const Grid& grid) {
    if (basis.rows() != 0 && basis.rows() != grid.n_dof())
        throw ContractError("eps_proj: basis row count != N_h");
    if (basis.cols() == 0) return grid.weighted_norm(u_fom);
    const Eigen::VectorXd w = grid.mass_weight(Eigen::VectorXd::Ones(grid.n_dof()));
    const Eigen::MatrixXd gram = basis.transpose() * w.asDiagonal() * basis;
    if (!gram.isApprox(Eigen::MatrixXd::Identity(basis.cols(), basis.cols()), 1e-8))
        throw ContractError("eps_proj: basis is not Omega-orthonormal");
    const Eigen::VectorXd coeffs = basis.transpose() * grid.mass_weight(u_fom);
    return grid.weighted_norm(u_fom - basis * coeffs);
}

double eps_entropy(double s_fom, double s_rom) { return std::abs(s_fom - s_rom); }

double eps_entropy0(double s_rom_0, double s_rom_t) {
    return std::abs(s_rom_0 - s_rom_t);
}

double eps_xt_max(const Manifold& manifold, const Eigen::MatrixXd& X,
                  const Eigen::MatrixXd& A) {
    return reconstruction_error(manifold, X, A).second;
}

namespace {

const auto& fmt = format_double;

} // namespace

void write_report_csv(const ComparisonReport& report, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw IoError("cannot open report file: " + path);
    os << "t";
    for (const auto& v : report.variants)
        os << ",eps_u_" << v.name << ",eps_S_" << v.name << ",eps_S0_" << v.name;
    os << ",eps_proj\n";
    for (size_t i = 0; i < report.t.size(); ++i) {
        os << fmt(report.t[i]);
        for (const auto& v : report.variants) {
            os << ',' << (i < v.eps_u.size() ? fmt(v.eps_u[i]) : "");
            os << ',' << (i < v.eps_s.size() ? fmt(v.eps_s[i]) : "");
            os << ',' << (i < v.eps_s0.size() ? fmt(v.eps_s0[i]) : "");
        }
        os << ',' << (i < report.eps_proj.size() ? fmt(report.eps_proj[i]) : "");
        os << '\n';
    }
    if (!os) throw IoError("failed writing report file: " + path);
}

void write_summary_json(const ComparisonReport& report, const std::string& path) {
    nlohmann::json j;
    for (const auto& [name, v] : report.eps_xt_max) j["eps_xt_max"][name] = v;
    for (const auto& [name, v] : report.fit_seconds) j["t_fit_seconds"][name] = v;
    for (const auto& [name, v] : report.online_seconds)
        j["t_online_seconds"][name] = v;
    std::ofstream os(path);
    if (!os) throw IoError("cannot open summary file: " + path);
    os << j.dump(2) << '\n';
    if (!os) throw IoError("failed writing summary file: " + path);
}

} // namespace esrom
