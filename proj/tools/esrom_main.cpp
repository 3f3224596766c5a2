#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "esrom/errors.hpp"
#include "esrom/pipeline.hpp"

namespace {

// Exit codes: 1 = configuration, 2 = numerics, 3 = I/O.
constexpr int kConfigExit = 1;
constexpr int kNumericsExit = 2;
constexpr int kIoExit = 3;

int classify(const std::exception& e) {
    if (dynamic_cast<const esrom::ConfigError*>(&e)) return kConfigExit;
    if (dynamic_cast<const esrom::IoError*>(&e)) return kIoExit;
    if (dynamic_cast<const esrom::AdmissibilityError*>(&e) ||
        dynamic_cast<const esrom::InadmissibleEntropyError*>(&e) ||
        dynamic_cast<const esrom::SingularTangentError*>(&e))
        return kNumericsExit;
    if (dynamic_cast<const esrom::ContractError*>(&e)) return kConfigExit;
    return kNumericsExit;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"entropy-stable reduced order models of 1-D conservation laws"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = ".";
    int parallel_rows = 0;
    std::vector<std::string> report_configs;

    auto* fom = app.add_subcommand("fom", "run the full order model");
    fom->add_option("--config", config_path, "experiment config file")->required();
    fom->add_option("--out", out_dir, "output directory");

    auto* fit = app.add_subcommand("fit", "fit a reduced manifold to snapshots");
    fit->add_option("--config", config_path, "experiment config file")->required();
    fit->add_option("--out", out_dir, "output directory");
    fit->add_option("--parallel-rows", parallel_rows,
                    "worker threads for row fits (disables warm starts)");

    auto* rom = app.add_subcommand("rom", "run the reduced order model");
    rom->add_option("--config", config_path, "experiment config file")->required();
    rom->add_option("--out", out_dir, "output directory");

    auto* rep = app.add_subcommand("report", "assemble comparison diagnostics");
    rep->add_option("--config", report_configs, "experiment config files")
        ->required()
        ->expected(-1);
    rep->add_option("--out", out_dir, "output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (fom->parsed()) {
            const auto cfg = esrom::load_config(config_path);
            const auto summary = esrom::cmd_fom(cfg, out_dir);
            std::printf("fom %s: n_s = %d, final S_h = %.12g\n", cfg.name.c_str(),
                        summary.n_snapshots, summary.final_entropy);
        } else if (fit->parsed()) {
            const auto cfg = esrom::load_config(config_path);
            const auto summary = esrom::cmd_fit(cfg, out_dir, parallel_rows);
            std::printf("fit %s: kind = %s, eps_xt_max = %.6g, %.2f s", cfg.name.c_str(),
                        summary.kind.c_str(), summary.eps_xt_max, summary.fit_seconds);
            if (summary.fallback_rows > 0)
                std::printf(" (%d fallback rows)", summary.fallback_rows);
            std::printf("\n");
        } else if (rom->parsed()) {
            const auto cfg = esrom::load_config(config_path);
            const auto trace = esrom::cmd_rom(cfg, out_dir);
            if (trace.failed()) {
                std::fprintf(stderr, "rom %s: failed at t = %.6g (%s)\n",
                             cfg.name.c_str(), trace.fail_time,
                             trace.fail_reason.c_str());
                return kNumericsExit;
            }
            std::printf("rom %s: ok, final S_r = %.12g\n", cfg.name.c_str(),
                        trace.total_entropy.back());
        } else if (rep->parsed()) {
            std::vector<esrom::ExperimentConfig> cfgs;
            for (const auto& path : report_configs)
                cfgs.push_back(esrom::load_config(path));
            esrom::cmd_report(cfgs, out_dir);
            std::printf("report: wrote %s and %s\n", cfgs.front().io_report.c_str(),
                        cfgs.front().io_summary.c_str());
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return classify(e);
    }
    return 0;
}
