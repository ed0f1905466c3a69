#include "loraadv/spoof.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "loraadv/error.hpp"

namespace loraadv {

KdeModel::KdeModel(std::vector<double> observations, std::size_t dim, double bandwidth)
    : data_(std::move(observations)), dim_(dim), h_(bandwidth) {
    if (!(bandwidth > 0.0) || !std::isfinite(bandwidth)) throw ConfigError("KDE bandwidth must be positive");
    if (dim == 0 || data_.empty() || data_.size() % dim != 0)
        throw ConfigError("KDE needs at least one observation of the declared dimension");
    if (!std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); }))
        throw ConfigError("KDE observations must be finite");
    n_ = data_.size() / dim;
}

KdeModel kde_fit(std::span<const IqSample> observations, double bandwidth) {
    if (observations.empty()) throw ConfigError("KDE fit needs at least one observation");
    std::vector<double> flat;
    flat.reserve(observations.size() * kSampleValues);
    for (const auto& s : observations) flat.insert(flat.end(), s.values.begin(), s.values.end());
    return KdeModel(std::move(flat), kSampleValues, bandwidth);
}

double kde_log_density(const KdeModel& model, std::span<const double> point) {
    if (point.size() != model.dim()) throw InputError("density point has the wrong dimension");
    const double h = model.bandwidth();
    const double inv_h = 1.0 / h;
    std::vector<double> exponents(model.size());
    for (std::size_t i = 0; i < model.size(); ++i) {
        const auto obs = model.observation(i);
        double acc = 0.0;
        for (std::size_t j = 0; j < point.size(); ++j) {
            const double u = (point[j] - obs[j]) * inv_h;
            acc += u * u;
        }
        exponents[i] = -0.5 * acc;
    }
    const double top = *std::max_element(exponents.begin(), exponents.end());
    double sum = 0.0;
    for (double e : exponents) sum += std::exp(e - top);
    const double per_kernel = -static_cast<double>(model.dim()) * (std::log(h) + 0.5 * std::log(2.0 * std::numbers::pi));
    return per_kernel + top + std::log(sum) - std::log(static_cast<double>(model.size()));
}

double kde_density(const KdeModel& model, std::span<const double> point) {
    return std::exp(kde_log_density(model, point));
}

std::vector<std::vector<double>> kde_sample_points(const KdeModel& model, std::size_t count, Rng& rng) {
    if (count == 0) throw InputError("KDE sample count must be at least 1");
    std::vector<std::vector<double>> out(count);
    for (auto& point : out) {
        const auto obs = model.observation(rng.index(model.size()));
        point.resize(model.dim());
        for (std::size_t j = 0; j < model.dim(); ++j) point[j] = obs[j] + model.bandwidth() * rng.normal();
    }
    return out;
}

std::vector<IqSample> kde_sample(const KdeModel& model, std::size_t count, Rng& rng) {
    if (model.dim() != kSampleValues) throw InputError("KDE model is not over 2x32 I/Q samples");
    const auto points = kde_sample_points(model, count, rng);
    std::vector<IqSample> out(count);
    for (std::size_t k = 0; k < count; ++k) std::copy(points[k].begin(), points[k].end(), out[k].values.begin());
    return out;
}

std::size_t rogue_observation_count(std::size_t total) { return std::max<std::size_t>(1, total / 2); }

LabeledDataset build_spoofed_dataset(Task task, std::span<const DeviceProfile> profiles, const ChirpConfig& config,
                                     std::size_t total, double bandwidth, Rng& rng) {
    config.validate();
    if (task == Task::DeviceIdLegit) throw ConfigError("DeviceId-Legit has no spoofed samples");
    if (total < 10) throw ConfigError("a dataset needs at least 10 samples");
    if (!(bandwidth > 0.0)) throw ConfigError("KDE bandwidth must be positive");
    const std::uint64_t base = rng.next_u64();
    std::vector<OriginPool> pools;
    for (const auto& [origin, count] : origin_counts(task, total)) {
        const DeviceProfile& profile = find_profile(profiles, origin);
        Rng stream = Rng::derive(base, origin.encode());
        if (origin.legitimacy == Legitimacy::Legitimate) {
            pools.push_back({origin, generate_windows(profile, config, count, stream)});
            continue;
        }
        const auto observed = generate_windows(profile, config, rogue_observation_count(total), stream);
        const KdeModel kde = kde_fit(observed, bandwidth);
        pools.push_back({origin, kde_sample(kde, count, stream)});
    }
    return assemble_dataset(task, std::move(pools), rng);
}

}  // namespace loraadv
