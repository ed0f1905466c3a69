#include "loraadv/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "loraadv/error.hpp"

namespace loraadv {

std::size_t BinSpec::cells() const {
    std::size_t n = 1;
    for (std::size_t a = 0; a < axes; ++a) n *= bins;
    return n;
}

DiscretePdf::DiscretePdf(std::vector<double> probabilities, BinSpec spec) : p_(std::move(probabilities)), spec_(spec) {
    if (p_.size() != spec_.cells()) throw InputError("probability vector does not match its bin grid");
    double total = 0.0;
    for (double v : p_) {
        if (!(v >= 0.0) || !std::isfinite(v)) throw InputError("probabilities must be finite and non-negative");
        total += v;
    }
    if (std::abs(total - 1.0) > 1e-12) throw InputError("probabilities must sum to 1");
}

BinSpec shared_bin_spec(std::span<const IqSample> a, std::span<const IqSample> b, std::size_t bins) {
    double r = 0.0;
    for (auto set : {a, b})
        for (const auto& s : set)
            for (double v : s.values) r = std::max(r, std::abs(v));
    if (!(r > 0.0)) throw ConfigError("histogram range is degenerate");
    return {bins, r, 2};
}

namespace {

std::size_t bin_of(double v, const BinSpec& spec) {
    const double pos = (v + spec.range) / (2.0 * spec.range) * static_cast<double>(spec.bins);
    if (!(pos > 0.0)) return 0;
    return std::min(static_cast<std::size_t>(pos), spec.bins - 1);
}

}  // namespace

DiscretePdf histogram_pdf(std::span<const IqSample> samples, const BinSpec& spec, double alpha) {
    if (samples.empty()) throw InputError("histogram needs at least one sample");
    if (spec.axes != 2 || spec.bins == 0) throw ConfigError("I/Q histograms use a 2-D grid with at least one bin");
    if (!(spec.range > 0.0) || !std::isfinite(spec.range)) throw ConfigError("histogram range is degenerate");
    if (!(alpha >= 0.0)) throw ConfigError("smoothing must be non-negative");

    std::vector<double> counts(spec.cells(), 0.0);
    for (const auto& s : samples) {
        for (std::size_t k = 0; k < kWindowLength; ++k) {
            const Complex z = s.point(k);
            counts[bin_of(z.real(), spec) * spec.bins + bin_of(z.imag(), spec)] += 1.0;
        }
    }
    const double n = static_cast<double>(samples.size() * kWindowLength);
    const double norm = 1.0 + alpha * static_cast<double>(spec.cells());
    for (auto& c : counts) c = (c / n + alpha) / norm;
    return DiscretePdf(std::move(counts), spec);
}

DiscretePdf histogram_pdf(std::span<const IqSample> samples, std::size_t bins, double alpha) {
    if (samples.empty()) throw InputError("histogram needs at least one sample");
    const Complex first = samples.front().point(0);
    bool identical = true;
    for (const auto& s : samples)
        for (std::size_t k = 0; k < kWindowLength && identical; ++k) identical = s.point(k) == first;
    if (identical) throw ConfigError("histogram range is degenerate: all points are identical");
    return histogram_pdf(samples, shared_bin_spec(samples, {}, bins), alpha);
}

double kl_divergence(const DiscretePdf& p, const DiscretePdf& q) {
    if (!(p.spec() == q.spec())) throw InputError("KL divergence needs identical bin grids");
    const auto& pp = p.probabilities();
    const auto& qq = q.probabilities();
    double acc = 0.0;
    for (std::size_t i = 0; i < pp.size(); ++i) {
        if (pp[i] == 0.0) continue;
        if (qq[i] == 0.0) return std::numeric_limits<double>::infinity();
        acc += pp[i] * std::log2(pp[i] / qq[i]);
    }
    return std::max(acc, 0.0);
}

double jsd(const DiscretePdf& p, const DiscretePdf& q) {
    if (!(p.spec() == q.spec())) throw InputError("JSD needs identical bin grids");
    const auto& pp = p.probabilities();
    const auto& qq = q.probabilities();
    // KL(p || m) + KL(q || m) with m = (p + q) / 2 formed per cell, so p == q gives exactly 0
    // and swapping the arguments gives the same bits.
    double acc = 0.0;
    for (std::size_t i = 0; i < pp.size(); ++i) {
        const double m = 0.5 * (pp[i] + qq[i]);
        const double tp = pp[i] > 0.0 ? pp[i] * std::log2(pp[i] / m) : 0.0;
        const double tq = qq[i] > 0.0 ? qq[i] * std::log2(qq[i] / m) : 0.0;
        acc += tp + tq;
    }
    return std::clamp(0.5 * acc, 0.0, 1.0);
}

std::size_t AccuracyReport::total() const {
    return confusion[0][0] + confusion[0][1] + confusion[1][0] + confusion[1][1];
}

AccuracyReport accuracy_report(std::span<const int> truth, std::span<const int> predicted) {
    if (truth.size() != predicted.size()) throw InputError("truth and prediction lengths differ");
    if (truth.empty()) throw InputError("accuracy needs at least one prediction");
    AccuracyReport r;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if ((truth[i] != 0 && truth[i] != 1) || (predicted[i] != 0 && predicted[i] != 1))
            throw InputError("labels must be 0 or 1");
        r.confusion[static_cast<std::size_t>(truth[i])][static_cast<std::size_t>(predicted[i])]++;
    }
    r.average = static_cast<double>(r.confusion[0][0] + r.confusion[1][1]) / static_cast<double>(truth.size());
    for (std::size_t c = 0; c < 2; ++c) {
        const std::size_t row = r.confusion[c][0] + r.confusion[c][1];
        r.per_class[c] = row == 0 ? 0.0 : static_cast<double>(r.confusion[c][c]) / static_cast<double>(row);
    }
    return r;
}

AccuracyReport evaluate_classifier(const Model& model, const LabeledDataset& dataset) {
    const auto samples = dataset.test_samples();
    std::vector<int> predicted(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) predicted[i] = predict(model, samples[i]);
    return accuracy_report(dataset.test_labels(), predicted);
}

Json to_json(const AccuracyReport& r) {
    return Json{{"average", r.average},
                {"per_class", {{"0", r.per_class[0]}, {"1", r.per_class[1]}}},
                {"confusion", {{r.confusion[0][0], r.confusion[0][1]}, {r.confusion[1][0], r.confusion[1][1]}}}};
}

}  // namespace loraadv
