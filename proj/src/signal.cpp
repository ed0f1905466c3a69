#include "loraadv/signal.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "loraadv/error.hpp"

namespace loraadv {

namespace {

constexpr double kPi = std::numbers::pi;

bool finite_interval(const Interval& iv) { return std::isfinite(iv.lo) && std::isfinite(iv.hi); }

// Splits n into (ceil(n/2), floor(n/2)).
std::pair<std::size_t, std::size_t> halves(std::size_t n) { return {n - n / 2, n / 2}; }

}  // namespace

void ChirpConfig::validate() const {
    if (spreading_factor < 5 || spreading_factor > 12)
        throw ConfigError("spreading factor must lie in [5, 12], got " + std::to_string(spreading_factor));
    if (!(bandwidth_hz > 0.0) || !std::isfinite(bandwidth_hz))
        throw ConfigError("bandwidth must be positive and finite");
    if (!(sample_rate_hz >= bandwidth_hz) || !std::isfinite(sample_rate_hz))
        throw ConfigError("sample rate must be finite and at least the bandwidth");
    if (std::isnan(snr_db) || snr_db == -std::numeric_limits<double>::infinity())
        throw ConfigError("snr_db must be finite or +inf (noiseless)");
}

double ChirpConfig::symbol_duration_s() const {
    return std::ldexp(1.0, spreading_factor) / bandwidth_hz;
}

double ChirpConfig::samples_per_symbol() const { return symbol_duration_s() * sample_rate_hz; }

void DeviceProfile::validate() const {
    if (!std::isfinite(cfo_hz) || !std::isfinite(iq_gain_imbalance) || !finite_interval(amp_offset_db) ||
        !finite_interval(phase_offset_rad))
        throw ConfigError(name() + ": profile fields must be finite");
    if (amp_offset_db.lo > amp_offset_db.hi || phase_offset_rad.lo > phase_offset_rad.hi)
        throw ConfigError(name() + ": interval lower bound exceeds upper bound");
    if (iq_gain_imbalance <= -1.0) throw ConfigError(name() + ": iq gain imbalance must exceed -1");
    if (legitimacy == Legitimacy::Rogue) {
        if (device == DeviceId::Device1 && !(amp_offset_db.lo > 2.0))
            throw ConfigError(name() + ": amplitude offset must exceed 2 dB");
        if (device == DeviceId::Device2 && !(amp_offset_db.lo >= 0.0 && amp_offset_db.hi < 1.0))
            throw ConfigError(name() + ": amplitude offset must lie in [0, 1) dB");
        if (phase_offset_rad.lo < 0.0 || phase_offset_rad.hi > kPi / 30.0)
            throw ConfigError(name() + ": phase offset must lie in [0, pi/30]");
    }
}

std::string DeviceProfile::name() const {
    std::string out = legitimacy == Legitimacy::Legitimate ? "legit-" : "rogue-";
    out += device == DeviceId::Device1 ? "device1" : "device2";
    return out;
}

DeviceProfile default_legit_profile(DeviceId device) {
    DeviceProfile p;
    p.device = device;
    p.legitimacy = Legitimacy::Legitimate;
    p.amp_offset_db = Interval::point(0.0);
    if (device == DeviceId::Device1) {
        p.cfo_hz = 200.0;
        p.iq_gain_imbalance = 0.01;
        p.phase_offset_rad = Interval::point(0.01);
    } else {
        p.cfo_hz = -150.0;
        p.iq_gain_imbalance = 0.02;
        p.phase_offset_rad = Interval::point(-0.015);
    }
    return p;
}

DeviceProfile default_rogue_profile(DeviceId device) {
    // Rogue transmitters are separate radios with their own oscillator and IQ chain.
    DeviceProfile p;
    p.device = device;
    p.legitimacy = Legitimacy::Rogue;
    p.phase_offset_rad = {0.0, kPi / 30.0};
    if (device == DeviceId::Device1) {
        p.cfo_hz = 25.0;
        p.iq_gain_imbalance = 0.0;
        p.amp_offset_db = {2.1, 3.0};
    } else {
        p.cfo_hz = 400.0;
        p.iq_gain_imbalance = 0.03;
        p.amp_offset_db = {0.0, 0.9};
    }
    return p;
}

std::vector<DeviceProfile> default_profiles() {
    return {default_legit_profile(DeviceId::Device1), default_legit_profile(DeviceId::Device2),
            default_rogue_profile(DeviceId::Device1), default_rogue_profile(DeviceId::Device2)};
}

double IqMatrix::mean_power() const {
    double acc = 0.0;
    for (double v : values) acc += v * v;
    return acc / static_cast<double>(kWindowLength);
}

bool IqMatrix::finite() const {
    return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
}

IqSample make_sample(std::span<const Complex> window) {
    if (window.size() != kWindowLength) throw InputError("an I/Q sample needs exactly 32 complex values");
    IqSample s;
    for (std::size_t k = 0; k < kWindowLength; ++k) {
        s.at(0, k) = window[k].real();
        s.at(1, k) = window[k].imag();
    }
    return s;
}

std::string_view task_name(Task task) {
    switch (task) {
        case Task::DeviceIdLegit: return "DeviceId-Legit";
        case Task::LegitVsRogue: return "LegitVsRogue";
        case Task::DeviceIdMixed: return "DeviceId-Mixed";
        case Task::DeviceIdRogueOnly: return "DeviceId-RogueOnly";
    }
    return "?";
}

std::string_view task_slug(Task task) {
    switch (task) {
        case Task::DeviceIdLegit: return "device-id-legit";
        case Task::LegitVsRogue: return "legit-vs-rogue";
        case Task::DeviceIdMixed: return "device-id-mixed";
        case Task::DeviceIdRogueOnly: return "device-id-rogue-only";
    }
    return "?";
}

Task parse_task(std::string_view text) {
    for (Task t : kAllTasks)
        if (text == task_name(t) || text == task_slug(t)) return t;
    throw ConfigError("unknown task '" + std::string(text) + "'");
}

std::string_view class_name(Task task, int label) {
    if (task == Task::LegitVsRogue) return label == 0 ? "Legitimate" : "Rogue";
    return label == 0 ? "Device1" : "Device2";
}

std::uint8_t SampleOrigin::encode() const {
    return static_cast<std::uint8_t>(static_cast<unsigned>(device) | (static_cast<unsigned>(legitimacy) << 1));
}

SampleOrigin SampleOrigin::decode(std::uint8_t code) {
    if (code > 3) throw InputError("invalid origin code " + std::to_string(code));
    return {static_cast<DeviceId>(code & 1u), static_cast<Legitimacy>((code >> 1) & 1u)};
}

int device_label(SampleOrigin origin) { return origin.device == DeviceId::Device1 ? 0 : 1; }
int legitimacy_label(SampleOrigin origin) { return origin.legitimacy == Legitimacy::Legitimate ? 0 : 1; }

int label_for(Task task, SampleOrigin origin) {
    return task == Task::LegitVsRogue ? legitimacy_label(origin) : device_label(origin);
}

void LabeledDataset::validate() const {
    if (labels.size() != samples.size() || origins.size() != samples.size())
        throw InputError("dataset samples, labels and origins differ in length");
    if (n_train > samples.size()) throw InputError("train split larger than dataset");
    std::array<std::size_t, 2> train_counts{}, test_counts{};
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (labels[i] != 0 && labels[i] != 1) throw InputError("labels must be 0 or 1");
        if (labels[i] != label_for(task, origins[i])) throw InputError("label disagrees with sample origin");
        (i < n_train ? train_counts : test_counts)[static_cast<std::size_t>(labels[i])]++;
    }
    if (train_counts[0] == 0 || train_counts[1] == 0 || test_counts[0] == 0 || test_counts[1] == 0)
        throw InputError("each class must appear in both splits");
}

std::vector<Complex> generate_chirp_frame(const ChirpConfig& config, std::size_t n_samples) {
    config.validate();
    if (n_samples == 0) throw InputError("chirp frame needs at least one sample");
    const double bw = config.bandwidth_hz;
    const double period = config.symbol_duration_s();
    const double rate = bw / period;  // Hz per second
    std::vector<Complex> frame(n_samples);
    for (std::size_t n = 0; n < n_samples; ++n) {
        const double t = static_cast<double>(n) / config.sample_rate_hz;
        const double tau = t - std::floor(t / period) * period;
        const double phase = 2.0 * kPi * (-0.5 * bw) * tau + kPi * rate * tau * tau;
        frame[n] = std::polar(1.0, phase);
    }
    return frame;
}

std::vector<Complex> apply_device_impairments(std::span<const Complex> frame, const DeviceProfile& profile,
                                              const ChirpConfig& config, Rng& rng) {
    if (frame.empty()) throw InputError("cannot impair an empty frame");
    const double amp_db = rng.uniform(profile.amp_offset_db.lo, profile.amp_offset_db.hi);
    const double phase = rng.uniform(profile.phase_offset_rad.lo, profile.phase_offset_rad.hi);
    const double gain = std::pow(10.0, amp_db / 20.0);
    const Complex rotation = std::polar(1.0, phase);
    const double cfo_step = 2.0 * kPi * profile.cfo_hz / config.sample_rate_hz;
    const double q_scale = 1.0 + profile.iq_gain_imbalance;

    std::vector<Complex> out(frame.begin(), frame.end());
    double power = 0.0;
    for (std::size_t n = 0; n < out.size(); ++n) {
        Complex v = out[n] * gain * rotation;
        if (profile.cfo_hz != 0.0) v *= std::polar(1.0, cfo_step * static_cast<double>(n));
        v = {v.real(), v.imag() * q_scale};
        out[n] = v;
        power += std::norm(v);
    }
    power /= static_cast<double>(out.size());

    if (std::isfinite(config.snr_db)) {
        const double sigma = std::sqrt(power / std::pow(10.0, config.snr_db / 10.0) / 2.0);
        for (auto& v : out) {
            const double ni = rng.normal();
            const double nq = rng.normal();
            v += Complex(sigma * ni, sigma * nq);
        }
    }
    return out;
}

std::vector<IqSample> generate_windows(const DeviceProfile& profile, const ChirpConfig& config, std::size_t count,
                                       Rng& rng) {
    profile.validate();
    const auto frame_len =
        static_cast<std::size_t>(std::llround(config.samples_per_symbol() * static_cast<double>(kFrameSymbols)));
    const std::size_t windows_per_frame = std::max<std::size_t>(1, frame_len / kWindowLength);
    const auto clean = generate_chirp_frame(config, windows_per_frame * kWindowLength);

    std::vector<IqSample> out;
    out.reserve(count);
    while (out.size() < count) {
        const auto frame = apply_device_impairments(clean, profile, config, rng);
        for (std::size_t w = 0; w < windows_per_frame && out.size() < count; ++w)
            out.push_back(make_sample(std::span(frame).subspan(w * kWindowLength, kWindowLength)));
    }
    return out;
}

std::vector<std::pair<SampleOrigin, std::size_t>> origin_counts(Task task, std::size_t total) {
    using D = DeviceId;
    using L = Legitimacy;
    const auto [c0, c1] = halves(total);
    switch (task) {
        case Task::DeviceIdLegit:
            return {{{D::Device1, L::Legitimate}, c0}, {{D::Device2, L::Legitimate}, c1}};
        case Task::DeviceIdRogueOnly:
            return {{{D::Device1, L::Rogue}, c0}, {{D::Device2, L::Rogue}, c1}};
        case Task::LegitVsRogue: {
            const auto [a0, a1] = halves(c0);
            const auto [b0, b1] = halves(c1);
            return {{{D::Device1, L::Legitimate}, a0},
                    {{D::Device2, L::Legitimate}, a1},
                    {{D::Device1, L::Rogue}, b0},
                    {{D::Device2, L::Rogue}, b1}};
        }
        case Task::DeviceIdMixed: {
            const auto [a0, a1] = halves(c0);
            const auto [b0, b1] = halves(c1);
            return {{{D::Device1, L::Legitimate}, a0},
                    {{D::Device1, L::Rogue}, a1},
                    {{D::Device2, L::Legitimate}, b0},
                    {{D::Device2, L::Rogue}, b1}};
        }
    }
    return {};
}

LabeledDataset assemble_dataset(Task task, std::vector<OriginPool> pools, Rng& rng) {
    struct Item {
        IqSample sample;
        SampleOrigin origin;
    };
    std::array<std::vector<Item>, 2> by_class;
    for (auto& pool : pools)
        for (auto& s : pool.samples) by_class[static_cast<std::size_t>(label_for(task, pool.origin))].push_back({s, pool.origin});

    const std::size_t total = by_class[0].size() + by_class[1].size();
    if (by_class[0].size() < 2 || by_class[1].size() < 2)
        throw ConfigError("each class needs at least two samples to populate both splits");
    const auto n_train = static_cast<std::size_t>(std::llround(kTrainFraction * static_cast<double>(total)));
    const std::size_t n_test = total - n_train;

    // Stratified split: the test share of each class is proportional to its size.
    std::array<std::size_t, 2> test_per_class{};
    test_per_class[0] = static_cast<std::size_t>(std::llround(
        static_cast<double>(by_class[0].size()) * static_cast<double>(n_test) / static_cast<double>(total)));
    test_per_class[0] = std::clamp<std::size_t>(test_per_class[0], 1, by_class[0].size() - 1);
    test_per_class[1] = n_test - test_per_class[0];
    if (test_per_class[1] < 1 || test_per_class[1] > by_class[1].size() - 1)
        throw ConfigError("cannot split dataset with both classes in each split");

    std::vector<Item> train, test;
    for (std::size_t c = 0; c < 2; ++c) {
        auto& items = by_class[c];
        rng.shuffle(std::span(items));
        const std::size_t cut = items.size() - test_per_class[c];
        train.insert(train.end(), items.begin(), items.begin() + static_cast<std::ptrdiff_t>(cut));
        test.insert(test.end(), items.begin() + static_cast<std::ptrdiff_t>(cut), items.end());
    }
    rng.shuffle(std::span(train));
    rng.shuffle(std::span(test));

    LabeledDataset ds;
    ds.task = task;
    ds.n_train = train.size();
    ds.samples.reserve(total);
    for (const auto* split : {&train, &test}) {
        for (const auto& item : *split) {
            ds.samples.push_back(item.sample);
            ds.origins.push_back(item.origin);
            ds.labels.push_back(label_for(task, item.origin));
        }
    }
    ds.validate();
    return ds;
}

const DeviceProfile& find_profile(std::span<const DeviceProfile> profiles, SampleOrigin origin) {
    const DeviceProfile* found = nullptr;
    for (const auto& p : profiles) {
        if (p.device == origin.device && p.legitimacy == origin.legitimacy) {
            if (found) throw ConfigError("duplicate profile for " + p.name());
            found = &p;
        }
    }
    if (!found) {
        DeviceProfile missing;
        missing.device = origin.device;
        missing.legitimacy = origin.legitimacy;
        throw ConfigError("task requires a profile for " + missing.name());
    }
    return *found;
}

LabeledDataset build_dataset(Task task, std::span<const DeviceProfile> profiles, const ChirpConfig& config,
                             std::size_t total, Rng& rng) {
    config.validate();
    if (total < 10) throw ConfigError("a dataset needs at least 10 samples");
    const std::uint64_t base = rng.next_u64();
    std::vector<OriginPool> pools;
    for (const auto& [origin, count] : origin_counts(task, total)) {
        const DeviceProfile& profile = find_profile(profiles, origin);
        Rng stream = Rng::derive(base, origin.encode());
        pools.push_back({origin, generate_windows(profile, config, count, stream)});
    }
    return assemble_dataset(task, std::move(pools), rng);
}

}  // namespace loraadv
