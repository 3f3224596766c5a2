#pragma once

#include <functional>
#include <memory>
#include <string>

#include "esrom/fitting.hpp"
#include "esrom/physics.hpp"
#include "esrom/rom.hpp"

namespace esrom {

/// One experiment, parsed from a flat key-per-line config file. Keys are
/// section-prefixed (model.*, grid.*, time.*, ic.*, fom.*, fit.*, rom.*,
/// io.*); unknown keys are errors.
struct ExperimentConfig {
    // model
    std::string model_kind = "burgers";
    double sw_gravity = 3.0;
    double euler_gamma = 1.4;

    // grid
    int n_cells = 0;
    double domain_a = 0.0;
    double domain_b = 1.0;

    // time
    double dt = 0.0;
    double t_end = 0.0;
    int snapshot_stride = 5;

    // ic
    std::string ic_name;

    // fom
    Dissipation fom_dissipation = Dissipation::none;

    // fit
    std::string fit_kind = "rational"; // linear | linear_augmented | quadratic | rational
    FitConfig fit;

    // rom
    RomVariant rom_variant = RomVariant::entropy_stable;
    bool rom_tse = true;
    Dissipation rom_dissipation = Dissipation::none;
    double rom_dt = 0.0; // 0 = use time.dt; must divide the snapshot spacing

    // io (file names, resolved against an output directory)
    std::string io_snapshots = "snapshots.bin";
    std::string io_entropy = "entropy.csv";
    std::string io_manifold = "manifold.bin";
    std::string io_fit_report = "fit_report.csv";
    std::string io_singular_values = "singular_values.csv";
    std::string io_trace = "rom_trace.csv";
    std::string io_coords = "rom_coords.csv";
    std::string io_status = "rom_status.json";
    std::string io_report = "report.csv";
    std::string io_summary = "summary.json";

    std::string name = "experiment";
};

ExperimentConfig load_config(const std::string& path);

std::unique_ptr<ConservationLaw> make_model(const ExperimentConfig& config);
Grid make_grid(const ExperimentConfig& config);

/// Named initial condition sampler (burgers_sine, sw_dambreak,
/// sw_perturbation, euler_sod_periodic).
std::function<Eigen::VectorXd(double)> make_initial_condition(
    const std::string& name, const ConservationLaw& model);

} // namespace esrom
