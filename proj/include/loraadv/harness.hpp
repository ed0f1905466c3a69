#pragma once

// Experiment configuration and the pipeline stages driven by the CLI.
//
// Output layout under output_dir:
//   config.json                          effective configuration
//   data/<task-slug>/                    dataset caches
//   models/<task-slug>_<arch>.json       trained classifiers
//   reports/<task-slug>_<arch>.json      accuracy reports
//   reports/<task-slug>_<arch>_loss.csv  per-epoch training loss
//   reports/accuracy.csv                 all reports in one table
//   spoof/jsd.csv                        legitimate vs spoofed divergence
//   spoof/constellation_<legit|rogue>_device<1|2>.csv
//   attack/sweep_<arch>.csv, attack/sweep.csv
//   attack/<classifier1|classifier2>_<arch>.svg
//   attack/constraints_<arch>.json

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

#include "loraadv/attack.hpp"
#include "loraadv/io.hpp"
#include "loraadv/metrics.hpp"
#include "loraadv/nn.hpp"
#include "loraadv/signal.hpp"

namespace loraadv {

/// -30 dB to 0 dB in 2 dB steps.
std::vector<double> default_psr_grid();

struct ExperimentConfig {
    std::uint64_t seed = 20240601;
    ChirpConfig chirp;
    std::vector<DeviceProfile> profiles = default_profiles();
    /// Indexed by Task.
    std::array<std::size_t, 4> totals{5000, 5000, 5000, 5000};
    /// The seed field is ignored; per-model seeds derive from `seed`.
    TrainConfig train;
    double kde_bandwidth = 1e-3;
    std::vector<double> psr_grid = default_psr_grid();
    std::array<double, 2> weights{0.5, 0.5};
    std::filesystem::path output_dir = "out";

    void validate() const;
    std::size_t total(Task task) const { return totals[static_cast<std::size_t>(task)]; }
};

/// output_dir is omitted so that artifacts do not depend on where they are written.
Json to_json(const ExperimentConfig& config);
/// Unknown keys are rejected; absent keys keep their defaults.
ExperimentConfig config_from_json(const Json& doc);
ExperimentConfig load_config(const std::filesystem::path& path);

Json to_json(const TrainConfig& config);
TrainConfig train_config_from_json(const Json& doc);

inline constexpr std::array<Arch, 2> kPipelineArchs = {Arch::CNN, Arch::FNN};

std::filesystem::path dataset_dir(const ExperimentConfig& config, Task task);
std::filesystem::path model_path(const ExperimentConfig& config, Task task, Arch arch);
std::filesystem::path report_path(const ExperimentConfig& config, Task task, Arch arch);

/// Derived sub-seeds; stable across releases.
std::uint64_t model_init_seed(const ExperimentConfig& config, Task task, Arch arch);
std::uint64_t train_seed(const ExperimentConfig& config, Task task, Arch arch);
std::uint64_t attack_seed(const ExperimentConfig& config, Arch arch);

/// DeviceId-Legit from the generator, the other three with KDE-spoofed rogues.
LabeledDataset generate_task_dataset(const ExperimentConfig& config, Task task);

/// {"task", "arch", "n_test", "average", "detect-<class0>", "detect-<class1>", "per_class", "confusion"}
Json accuracy_report_json(Task task, Arch arch, const AccuracyReport& report);

struct JsdRow {
    DeviceId device = DeviceId::Device1;
    double jsd_bits = 0.0;
    std::size_t n_bins = 0;
    double range = 0.0;
};

/// Legitimate Device-i samples pooled over every cached dataset against the
/// spoofed Device-i samples pooled over the spoofed datasets.
std::vector<JsdRow> spoof_fidelity(const std::vector<LabeledDataset>& datasets);
std::string jsd_csv(const std::vector<JsdRow>& rows);

void cmd_gen_data(const ExperimentConfig& config, std::ostream& log);
void cmd_train(const ExperimentConfig& config, std::optional<Task> task, std::optional<Arch> arch, std::ostream& log);
void cmd_eval(const ExperimentConfig& config, std::optional<Task> task, std::optional<Arch> arch, std::ostream& log);
void cmd_spoof_report(const ExperimentConfig& config, std::ostream& log);
void cmd_attack_sweep(const ExperimentConfig& config, std::optional<Arch> arch, std::ostream& log);
void cmd_run_all(const ExperimentConfig& config, std::ostream& log);

}  // namespace loraadv
