#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "loraadv/io.hpp"
#include "loraadv/nn.hpp"
#include "loraadv/signal.hpp"

namespace loraadv {

inline constexpr std::size_t kDefaultBins = 64;
inline constexpr double kDefaultSmoothing = 1e-6;

/// Uniform grid of `bins` cells per axis over [-range, range] on each of `axes` axes.
struct BinSpec {
    std::size_t bins = kDefaultBins;
    double range = 1.0;
    std::size_t axes = 2;

    std::size_t cells() const;
    bool operator==(const BinSpec&) const = default;
};

class DiscretePdf {
public:
    /// Validates non-negativity and unit total mass (within 1e-12).
    DiscretePdf(std::vector<double> probabilities, BinSpec spec);

    const std::vector<double>& probabilities() const { return p_; }
    const BinSpec& spec() const { return spec_; }

private:
    std::vector<double> p_;
    BinSpec spec_;
};

/// Range set to the largest |I| or |Q| over both sample sets.
BinSpec shared_bin_spec(std::span<const IqSample> a, std::span<const IqSample> b, std::size_t bins = kDefaultBins);

/// Pools every (I, Q) point, bins it on the 2-D grid (points beyond the range
/// land in the edge cells), then p = (count/N + alpha) / (1 + alpha * cells).
DiscretePdf histogram_pdf(std::span<const IqSample> samples, const BinSpec& spec,
                          double alpha = kDefaultSmoothing);
/// Same, with the range taken from the samples themselves; identical points are rejected.
DiscretePdf histogram_pdf(std::span<const IqSample> samples, std::size_t bins = kDefaultBins,
                          double alpha = kDefaultSmoothing);

/// KL(p || q) in bits; zero-probability terms of p contribute nothing.
double kl_divergence(const DiscretePdf& p, const DiscretePdf& q);
/// Jensen-Shannon divergence in bits, within [0, 1].
double jsd(const DiscretePdf& p, const DiscretePdf& q);

struct AccuracyReport {
    double average = 0.0;
    std::array<double, 2> per_class{};
    /// confusion[truth][predicted]
    std::array<std::array<std::size_t, 2>, 2> confusion{};

    std::size_t total() const;
};

AccuracyReport accuracy_report(std::span<const int> truth, std::span<const int> predicted);

/// Inference over the test split; ties go to label 0.
AccuracyReport evaluate_classifier(const Model& model, const LabeledDataset& dataset);

/// {"average", "per_class": {"0", "1"}, "confusion"}
Json to_json(const AccuracyReport& report);

}  // namespace loraadv
