#pragma once

// Gaussian-kernel density estimation over flattened I/Q windows and the
// spoofed (rogue) datasets sampled from it.

#include <cstddef>
#include <span>
#include <vector>

#include "loraadv/random.hpp"
#include "loraadv/signal.hpp"

namespace loraadv {

inline constexpr double kDefaultKdeBandwidth = 1e-3;

/// f(x) = 1/n sum_i prod_j (1/h) K((x_j - x_ij) / h), K the standard normal density.
class KdeModel {
public:
    KdeModel(std::vector<double> observations, std::size_t dim, double bandwidth);

    std::size_t size() const { return n_; }
    std::size_t dim() const { return dim_; }
    double bandwidth() const { return h_; }
    std::span<const double> observation(std::size_t i) const { return std::span(data_).subspan(i * dim_, dim_); }

    bool operator==(const KdeModel&) const = default;

private:
    std::vector<double> data_;
    std::size_t n_ = 0;
    std::size_t dim_ = 0;
    double h_ = kDefaultKdeBandwidth;
};

KdeModel kde_fit(std::span<const IqSample> observations, double bandwidth = kDefaultKdeBandwidth);

/// Accumulated in the log domain; finite even when the density underflows.
double kde_log_density(const KdeModel& model, std::span<const double> point);
double kde_density(const KdeModel& model, std::span<const double> point);

/// Each draw is a uniformly chosen observation plus N(0, h^2) noise per coordinate.
std::vector<std::vector<double>> kde_sample_points(const KdeModel& model, std::size_t count, Rng& rng);
std::vector<IqSample> kde_sample(const KdeModel& model, std::size_t count, Rng& rng);

/// Task dataset in which every rogue sample is KDE-generated from observations
/// of the matching rogue profile; legitimate samples come straight from the
/// signal generator. Supports LegitVsRogue, DeviceId-Mixed and DeviceId-RogueOnly.
LabeledDataset build_spoofed_dataset(Task task, std::span<const DeviceProfile> profiles, const ChirpConfig& config,
                                     std::size_t total, double bandwidth, Rng& rng);

/// Rogue observations gathered per device before fitting: half the task total.
std::size_t rogue_observation_count(std::size_t total);

}  // namespace loraadv
