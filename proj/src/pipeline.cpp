#include "esrom/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "esrom/errors.hpp"

namespace esrom {

namespace {

std::string join(const std::string& dir, const std::string& name) {
    if (dir.empty() || dir == ".") return name;
    if (dir.back() == '/') return dir + name;
    return dir + "/" + name;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
        .count();
}

} // namespace

std::string fit_meta_path(const ExperimentConfig& config, const std::string& out_dir) {
    return join(out_dir, config.io_manifold) + ".meta.json";
}

FomSummary cmd_fom(const ExperimentConfig& config, const std::string& out_dir) {
    const auto model = make_model(config);
    const Grid grid = make_grid(config);
    const auto ic = make_initial_condition(config.ic_name, *model);
    const FomResult result = run_fom(*model, grid, ic, config.dt, config.t_end,
                                     config.snapshot_stride, config.fom_dissipation);
    write_snapshots(result.snapshots, join(out_dir, config.io_snapshots));
    write_entropy_csv(result.trace, join(out_dir, config.io_entropy));
    return {result.snapshots.n_snapshots(), result.trace.total_entropy.back()};
}

Eigen::MatrixXd encode_coordinates(const Manifold& manifold, const SnapshotSet& snaps,
                                   const Grid& grid) {
    const Eigen::MatrixXd& X = snaps.data;
    if (const auto* lin = dynamic_cast<const LinearManifold*>(&manifold)) {
        TangentSolver solver(lin->basis(), grid);
        Eigen::MatrixXd A(X.cols(), lin->reduced_dim());
        for (Eigen::Index j = 0; j < X.cols(); ++j)
            A.row(j) = solver.dagger_apply(X.col(j) - lin->shift()).transpose();
        return A;
    }
    if (const auto* quad = dynamic_cast<const QuadraticManifold*>(&manifold)) {
        return (quad->basis().transpose() * (X.colwise() - quad->shift())).transpose();
    }
    if (dynamic_cast<const RationalQuadraticManifold*>(&manifold)) {
        const PodResult pod = pod_basis(X, manifold.reduced_dim());
        return pod_coordinates(X, pod.basis);
    }
    throw ContractError("encode_coordinates: unsupported manifold kind");
}

FitSummary cmd_fit(const ExperimentConfig& config, const std::string& out_dir,
                   int parallel_rows) {
    const SnapshotSet snaps = read_snapshots(join(out_dir, config.io_snapshots));
    const Grid grid = snaps.grid();
    const auto model = make_model(config);
    const Eigen::MatrixXd& X = snaps.data;
    const int r = config.fit.r;
    if (r > std::min<Eigen::Index>(X.rows(), X.cols()))
        throw ConfigError("fit.r exceeds the snapshot rank bound");

    const auto start = std::chrono::steady_clock::now();
    std::unique_ptr<Manifold> manifold;
    std::vector<RowFitInfo> report;
    Eigen::VectorXd singular_values;
    int fallback_rows = 0;

    if (config.fit_kind == "linear" || config.fit_kind == "linear_augmented") {
        Eigen::MatrixXd fit_data = X;
        if (config.fit_kind == "linear_augmented")
            fit_data = augment_snapshots(snaps, *model).data;
        const PodResult pod = pod_basis(fit_data, r);
        singular_values = pod.singular_values;
        manifold =
            std::make_unique<LinearManifold>(omega_orthonormalize(pod.basis, grid));
    } else if (config.fit_kind == "quadratic") {
        const PodResult pod = pod_basis(X.colwise() - X.col(0), r);
        singular_values = pod.singular_values;
        manifold = std::make_unique<QuadraticManifold>(
            fit_quadratic(X, pod.basis, config.fit.lambda));
    } else if (config.fit_kind == "rational") {
        const PodResult pod = pod_basis(X, r);
        singular_values = pod.singular_values;
        FitConfig fit_cfg = config.fit;
        fit_cfg.parallel_rows = parallel_rows;
        RationalFitResult result =
            fit_rational_quadratic(X, pod.basis, fit_cfg, snaps.n_vars);
        report = std::move(result.report);
        for (const auto& row : report) fallback_rows += row.fallback ? 1 : 0;
        manifold = std::make_unique<RationalQuadraticManifold>(
            std::move(result.manifold));
    } else {
        throw ConfigError("unknown fit.manifold_kind: " + config.fit_kind);
    }
    const double fit_seconds = seconds_since(start);

    const Eigen::MatrixXd A = encode_coordinates(*manifold, snaps, grid);
    const double eps = eps_xt_max(*manifold, X, A);

    write_manifold(*manifold, join(out_dir, config.io_manifold));
    write_singular_values_csv(singular_values, join(out_dir, config.io_singular_values));
    write_fit_report_csv(report, join(out_dir, config.io_fit_report));
    write_fit_meta_json(config.fit_kind, r, eps, fit_seconds,
                        fit_meta_path(config, out_dir));
    return {config.fit_kind, eps, fit_seconds, fallback_rows};
}

RomTrace cmd_rom(const ExperimentConfig& config, const std::string& out_dir) {
    const SnapshotSet snaps = read_snapshots(join(out_dir, config.io_snapshots));
    const Grid grid = snaps.grid();
    const auto model = make_model(config);
    if (model->n_vars() != snaps.n_vars)
        throw ConfigError("model/snapshot variable count mismatch");

    std::shared_ptr<Manifold> manifold(read_manifold(join(out_dir, config.io_manifold)));
    Eigen::MatrixXd A0 = encode_coordinates(*manifold, snaps, grid);
    Eigen::VectorXd z0 = A0.row(0).transpose();

    std::shared_ptr<const Manifold> rom_manifold = manifold;
    if (config.rom_tse) {
        rom_manifold = std::make_shared<TseManifold>(
            manifold, std::shared_ptr<const ConservationLaw>(make_model(config)));
        Eigen::VectorXd lifted(z0.size() + 1);
        lifted << z0, 0.0;
        z0 = lifted;
    }

    RomConfig rom_cfg;
    rom_cfg.variant = config.rom_variant;
    rom_cfg.tse = config.rom_tse;
    rom_cfg.dt = config.rom_dt > 0.0 ? config.rom_dt : config.dt;
    rom_cfg.t_end = config.t_end;
    rom_cfg.coord_stride = static_cast<int>(
        std::llround(config.snapshot_stride * config.dt / rom_cfg.dt));
    rom_cfg.dissipation = config.rom_dissipation;

    const auto start = std::chrono::steady_clock::now();
    const RomTrace trace = run_rom(*model, grid, *rom_manifold, rom_cfg, z0);
    const double online_seconds = seconds_since(start);

    write_rom_trace_csv(trace, join(out_dir, config.io_trace));
    write_rom_coords_csv(trace, config.rom_tse, join(out_dir, config.io_coords));
    write_rom_status_json(trace, online_seconds, join(out_dir, config.io_status));
    return trace;
}

ComparisonReport cmd_report(const std::vector<ExperimentConfig>& configs,
                            const std::string& out_dir) {
    if (configs.empty()) throw ContractError("cmd_report: no configs given");

    ComparisonReport report;
    const ExperimentConfig& first = configs.front();
    const SnapshotSet snaps = read_snapshots(join(out_dir, first.io_snapshots));
    const Grid grid = snaps.grid();
    const auto model = make_model(first);

    report.t.assign(snaps.times.data(), snaps.times.data() + snaps.times.size());
    std::vector<double> fom_entropy(snaps.n_snapshots());
    for (int j = 0; j < snaps.n_snapshots(); ++j)
        fom_entropy[j] = total_entropy(*model, grid, snaps.data.col(j));

    // Ideal linear projection error at the configured reduced dimension.
    {
        const PodResult pod = pod_basis(snaps.data, first.fit.r);
        const Eigen::MatrixXd basis = omega_orthonormalize(pod.basis, grid);
        report.eps_proj.resize(snaps.n_snapshots());
        for (int j = 0; j < snaps.n_snapshots(); ++j)
            report.eps_proj[j] = eps_proj(snaps.data.col(j), basis, grid);
    }

    for (const ExperimentConfig& cfg : configs) {
        std::shared_ptr<Manifold> manifold(
            read_manifold(join(out_dir, cfg.io_manifold)));
        std::shared_ptr<const Manifold> decoder = manifold;
        if (cfg.rom_tse)
            decoder = std::make_shared<TseManifold>(
                manifold, std::shared_ptr<const ConservationLaw>(make_model(cfg)));

        Eigen::VectorXd coord_times;
        const Eigen::MatrixXd coords =
            read_rom_coords_csv(join(out_dir, cfg.io_coords), coord_times);

        VariantSeries series;
        series.name = cfg.name;
        double s0 = 0.0;
        for (Eigen::Index j = 0; j < coords.cols(); ++j) {
            if (j >= snaps.n_snapshots()) break;
            if (std::abs(coord_times[j] - snaps.times[j]) >
                1e-9 * (1.0 + std::abs(snaps.times[j])))
                throw ContractError(
                    "cmd_report: ROM coordinate times do not align with the "
                    "snapshot grid");
            const Eigen::VectorXd u_rom = decoder->decode(coords.col(j));
            const double s_rom = total_entropy(*model, grid, u_rom);
            if (j == 0) s0 = s_rom;
            series.eps_u.push_back(eps_u(snaps.data.col(j), u_rom, grid));
            series.eps_s.push_back(eps_entropy(fom_entropy[static_cast<size_t>(j)], s_rom));
            series.eps_s0.push_back(eps_entropy0(s0, s_rom));
        }

        const std::string meta = fit_meta_path(cfg, out_dir);
        if (std::ifstream ms(meta); ms) {
            const nlohmann::json j = nlohmann::json::parse(ms);
            report.eps_xt_max[cfg.name] = j.value("eps_xt_max", 0.0);
            report.fit_seconds[cfg.name] = j.value("t_fit_seconds", 0.0);
        }
        if (std::ifstream ss(join(out_dir, cfg.io_status)); ss) {
            const nlohmann::json j = nlohmann::json::parse(ss);
            report.online_seconds[cfg.name] = j.value("t_online_seconds", 0.0);
        }
        report.variants.push_back(std::move(series));
    }

    write_report_csv(report, join(out_dir, first.io_report));
    write_summary_json(report, join(out_dir, first.io_summary));
    return report;
}

} // namespace esrom
