#pragma once

#include <string>
#include <vector>

#include "esrom/config.hpp"
#include "esrom/diagnostics.hpp"
#include "esrom/io.hpp"

namespace esrom {

/// The four pipeline stages behind the CLI subcommands. Every stage reads
/// and writes only through the artifact files named in the config, resolved
/// against `out_dir`.

struct FomSummary {
    int n_snapshots = 0;
    double final_entropy = 0.0;
};

/// Run the FOM and write the snapshot file and entropy trace CSV.
FomSummary cmd_fom(const ExperimentConfig& config, const std::string& out_dir);

struct FitSummary {
    std::string kind;
    double eps_xt_max = 0.0;
    double fit_seconds = 0.0;
    int fallback_rows = 0;
};

/// Fit the configured manifold to the snapshot file; write the manifold
/// file, singular-value CSV, fit report CSV and fit metadata JSON.
FitSummary cmd_fit(const ExperimentConfig& config, const std::string& out_dir,
                   int parallel_rows = 0);

/// Run the ROM from the first snapshot's coordinates; write the trace CSV,
/// strided coordinate CSV and status JSON (also on failure).
RomTrace cmd_rom(const ExperimentConfig& config, const std::string& out_dir);

/// Assemble the comparison report across experiment variants; writes the
/// report CSV and summary JSON named by the first config.
ComparisonReport cmd_report(const std::vector<ExperimentConfig>& configs,
                            const std::string& out_dir);

/// Encoder of a fitted manifold: generalized coordinates of full states,
/// matching the coordinates the manifold was fit in. The POD basis used by
/// the rational fit is recomputed from the snapshot data (deterministic SVD).
Eigen::MatrixXd encode_coordinates(const Manifold& manifold, const SnapshotSet& snaps,
                                   const Grid& grid);

std::string fit_meta_path(const ExperimentConfig& config, const std::string& out_dir);

} // namespace esrom
