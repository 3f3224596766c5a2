#pragma once

#include <memory>
#include <string>
#include <vector>

#include "esrom/fitting.hpp"
#include "esrom/fom.hpp"
#include "esrom/manifold.hpp"
#include "esrom/rom.hpp"

namespace esrom {

/// Shortest decimal representation that round-trips the double exactly.
std::string format_double(double v);

// Binary formats are little-endian f64 throughout; 2-D blocks are stored
// column-major and slice sequences row by row. A little-endian host is
// assumed.

/// Snapshot file: magic "ESRM", u32 version=1, u32 n_vars, u32 n_cells,
/// u32 n_s, f64 domain a, f64 domain b, the N_h x n_s data column-major
/// (one snapshot contiguous), then the n_s times.
void write_snapshots(const SnapshotSet& snaps, const std::string& path);
SnapshotSet read_snapshots(const std::string& path);

/// Manifold file: magic "ESMF", u32 version=1, u32 kind (linear=0,
/// quadratic=1, rational=2), u32 N_h, u32 r, then the coefficient blocks in
/// declaration order:
///   linear:    basis (N_h x r), shift (N_h)
///   quadratic: basis (N_h x r), quad coeffs (N_h x r(r+1)/2), shift (N_h)
///   rational:  H2 slices packed symmetric (N_h x r(r+1)/2, row-wise p<=q),
///              H1 (N_h x r), u_ref (N_h),
///              L slices packed lower-triangular (N_h x r(r+1)/2, row-wise p>=q)
/// TSE is a runtime wrapper and is never serialized.
void write_manifold(const Manifold& manifold, const std::string& path);
std::unique_ptr<Manifold> read_manifold(const std::string& path);

/// Entropy trace CSV with header t,S_h,rate_cons,rate_diss.
void write_entropy_csv(const EntropyTrace& trace, const std::string& path);

/// ROM trace CSV with header t,S_r,rate_cons,rate_diss,eps_Pi,alpha; columns
/// not recorded by the run are written empty.
void write_rom_trace_csv(const RomTrace& trace, const std::string& path);

/// Strided reduced coordinates as CSV: t,a_0,...,a_{r-1}[,alpha].
void write_rom_coords_csv(const RomTrace& trace, bool tse, const std::string& path);
Eigen::MatrixXd read_rom_coords_csv(const std::string& path, Eigen::VectorXd& times);

/// Run status JSON: {status, fail_time, fail_reason, t_online_seconds}.
void write_rom_status_json(const RomTrace& trace, double online_seconds,
                           const std::string& path);

/// Fit report CSV with header row,iters,final_residual,fallback_used.
void write_fit_report_csv(const std::vector<RowFitInfo>& report,
                          const std::string& path);

/// Singular values CSV with header index,sigma.
void write_singular_values_csv(const Eigen::VectorXd& sigma, const std::string& path);

/// Fit metadata JSON: {kind, r, eps_xt_max, t_fit_seconds}.
void write_fit_meta_json(const std::string& kind, int r, double eps_xt_max,
                         double fit_seconds, const std::string& path);

} // namespace esrom
