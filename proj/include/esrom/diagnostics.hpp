#pragma once

#include <map>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "esrom/grid.hpp"
#include "esrom/manifold.hpp"

namespace esrom {

/// ||u_fom - u_rom||_{Omega_h}.
double eps_u(const Eigen::VectorXd& u_fom, const Eigen::VectorXd& u_rom,
             const Grid& grid);

/// Ideal linear projection error ||(I - Phi Phi^T Omega) u||_{Omega_h} for an
/// Omega-orthonormal basis.
double eps_proj(const Eigen::VectorXd& u_fom, const Eigen::MatrixXd& basis,
                const Grid& grid);

/// |S_fom - S_rom|.
double eps_entropy(double s_fom, double s_rom);

/// |S_rom(0) - S_rom(t)|.
double eps_entropy0(double s_rom_0, double s_rom_t);

/// Max absolute element of phi(A) - X.
double eps_xt_max(const Manifold& manifold, const Eigen::MatrixXd& X,
                  const Eigen::MatrixXd& A);

/// Error series of one ROM variant against the FOM on the snapshot time grid.
struct VariantSeries {
    std::string name;
    std::vector<double> eps_u;
    std::vector<double> eps_s;
    std::vector<double> eps_s0;
};

struct ComparisonReport {
    std::vector<double> t;
    std::vector<VariantSeries> variants;
    std::vector<double> eps_proj;
    std::map<std::string, double> eps_xt_max;  // per manifold/variant
    std::map<std::string, double> fit_seconds;
    std::map<std::string, double> online_seconds;
};

void write_report_csv(const ComparisonReport& report, const std::string& path);
void write_summary_json(const ComparisonReport& report, const std::string& path);

} // namespace esrom
