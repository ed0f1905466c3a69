#pragma once

// Synthetic LoRa-like baseband generation: chirp frames, per-device hardware
// impairments, and labeled 2x32 I/Q datasets.

#include <array>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "loraadv/random.hpp"

namespace loraadv {

using Complex = std::complex<double>;

struct ChirpConfig {
    int spreading_factor = 7;
    double bandwidth_hz = 125000.0;
    double sample_rate_hz = 1000000.0;
    /// +infinity disables the noise stage.
    double snr_db = 20.0;

    void validate() const;
    double symbol_duration_s() const;
    double samples_per_symbol() const;
};

enum class DeviceId : std::uint8_t { Device1 = 0, Device2 = 1 };
enum class Legitimacy : std::uint8_t { Legitimate = 0, Rogue = 1 };

struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    static Interval point(double v) { return {v, v}; }
    bool contains(double v) const { return lo <= v && v <= hi; }
};

struct DeviceProfile {
    DeviceId device = DeviceId::Device1;
    Legitimacy legitimacy = Legitimacy::Legitimate;
    double cfo_hz = 0.0;
    Interval amp_offset_db;
    Interval phase_offset_rad;
    double iq_gain_imbalance = 0.0;

    void validate() const;
    std::string name() const;
};

/// Legitimate Device 1/2 and the rogue transmitters mimicking them.
DeviceProfile default_legit_profile(DeviceId device);
DeviceProfile default_rogue_profile(DeviceId device);
std::vector<DeviceProfile> default_profiles();

inline constexpr std::size_t kWindowLength = 32;
inline constexpr std::size_t kSampleValues = 2 * kWindowLength;

/// 2x32 real matrix; row 0 holds I, row 1 holds Q. Used for classifier
/// inputs as well as input gradients and perturbations.
struct IqMatrix {
    std::array<double, kSampleValues> values{};

    double& at(std::size_t row, std::size_t col) { return values[row * kWindowLength + col]; }
    double at(std::size_t row, std::size_t col) const { return values[row * kWindowLength + col]; }
    Complex point(std::size_t k) const { return {values[k], values[kWindowLength + k]}; }
    std::span<const double> flat() const { return values; }
    std::span<double> flat() { return values; }
    double mean_power() const;
    bool finite() const;

    bool operator==(const IqMatrix&) const = default;
};

/// One classifier input.
using IqSample = IqMatrix;

IqSample make_sample(std::span<const Complex> window);

enum class Task : std::uint8_t { DeviceIdLegit = 0, LegitVsRogue = 1, DeviceIdMixed = 2, DeviceIdRogueOnly = 3 };

inline constexpr std::array<Task, 4> kAllTasks = {Task::DeviceIdLegit, Task::LegitVsRogue,
                                                  Task::DeviceIdMixed, Task::DeviceIdRogueOnly};

std::string_view task_name(Task task);  // "DeviceId-Legit", ...
std::string_view task_slug(Task task);  // "device-id-legit", ...
Task parse_task(std::string_view text);
/// Human-readable meaning of label 0/1 under a task ("Device1", "Legitimate", ...).
std::string_view class_name(Task task, int label);

/// Which transmitter produced a sample; every task label is a function of it.
struct SampleOrigin {
    DeviceId device = DeviceId::Device1;
    Legitimacy legitimacy = Legitimacy::Legitimate;

    std::uint8_t encode() const;
    static SampleOrigin decode(std::uint8_t code);
    bool operator==(const SampleOrigin&) const = default;
};

int label_for(Task task, SampleOrigin origin);
int device_label(SampleOrigin origin);
int legitimacy_label(SampleOrigin origin);

/// Samples are stored train split first; test split is [n_train, size()).
struct LabeledDataset {
    Task task = Task::DeviceIdLegit;
    std::vector<IqSample> samples;
    std::vector<int> labels;
    std::vector<SampleOrigin> origins;
    std::size_t n_train = 0;

    std::size_t size() const { return samples.size(); }
    std::size_t n_test() const { return samples.size() - n_train; }
    std::span<const IqSample> train_samples() const { return std::span(samples).first(n_train); }
    std::span<const IqSample> test_samples() const { return std::span(samples).subspan(n_train); }
    std::span<const int> train_labels() const { return std::span(labels).first(n_train); }
    std::span<const int> test_labels() const { return std::span(labels).subspan(n_train); }
    std::span<const SampleOrigin> test_origins() const { return std::span(origins).subspan(n_train); }

    /// Throws InputError when sizes, labels or split invariants are broken.
    void validate() const;
};

inline constexpr double kTrainFraction = 0.8;
inline constexpr std::size_t kFrameSymbols = 1;

/// Noiseless repeating up-chirp from -B/2 to +B/2, unit amplitude, zero phase at t = 0.
std::vector<Complex> generate_chirp_frame(const ChirpConfig& config, std::size_t n_samples);

/// Amplitude, phase, CFO, IQ imbalance, then AWGN relative to the impaired frame power.
std::vector<Complex> apply_device_impairments(std::span<const Complex> frame, const DeviceProfile& profile,
                                              const ChirpConfig& config, Rng& rng);

/// `count` consecutive, non-overlapping windows drawn from freshly impaired frames.
std::vector<IqSample> generate_windows(const DeviceProfile& profile, const ChirpConfig& config,
                                       std::size_t count, Rng& rng);

/// Samples for one origin; used to assemble datasets from any source.
struct OriginPool {
    SampleOrigin origin;
    std::vector<IqSample> samples;
};

/// Sample counts per origin for a task of `total` samples. Class 0 receives
/// ceil(total/2); within a class the first listed origin receives the ceiling.
std::vector<std::pair<SampleOrigin, std::size_t>> origin_counts(Task task, std::size_t total);

/// Labels, shuffles and performs a stratified 80/20 split.
LabeledDataset assemble_dataset(Task task, std::vector<OriginPool> pools, Rng& rng);

LabeledDataset build_dataset(Task task, std::span<const DeviceProfile> profiles, const ChirpConfig& config,
                             std::size_t total, Rng& rng);

const DeviceProfile& find_profile(std::span<const DeviceProfile> profiles, SampleOrigin origin);

}  // namespace loraadv
