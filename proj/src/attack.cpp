#include "loraadv/attack.hpp"

#include <algorithm>
#include <cmath>

#include "loraadv/error.hpp"
#include "loraadv/io.hpp"

namespace loraadv {

std::string_view variant_name(AttackVariant v) {
    switch (v) {
        case AttackVariant::ForClassifier1: return "fgsm-c1";
        case AttackVariant::ForClassifier2: return "fgsm-c2";
        case AttackVariant::Hybrid: return "hybrid";
        case AttackVariant::GaussianNoise: return "gaussian";
    }
    return "?";
}

std::string_view target_name(TargetClassifier t) {
    return t == TargetClassifier::Classifier1 ? "classifier1" : "classifier2";
}

AttackVariant parse_variant(std::string_view text) {
    for (auto v : kAllVariants)
        if (variant_name(v) == text) return v;
    throw ConfigError("unknown attack variant: " + std::string(text));
}

void AttackSpec::validate() const {
    if (std::isnan(psr_db)) throw ConfigError("PSR must be a number");
    if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) throw ConfigError("epsilon must be finite and non-negative");
    if (!(weights[0] >= 0.0) || !(weights[1] >= 0.0)) throw ConfigError("hybrid weights must be non-negative");
    if (std::abs(weights[0] + weights[1] - 1.0) > 1e-9) throw ConfigError("hybrid weights must sum to 1");
    if (!std::isfinite(clip.low) || !std::isfinite(clip.high) || !(clip.low < clip.high))
        throw ConfigError("clip bounds must be finite with low < high");
}

double psr_to_epsilon(double psr_db, double reference_power) {
    if (!(reference_power > 0.0) || !std::isfinite(reference_power))
        throw ConfigError("reference power must be positive");
    if (std::isnan(psr_db) || psr_db == std::numeric_limits<double>::infinity())
        throw ConfigError("PSR must be finite or -inf");
    if (psr_db == -std::numeric_limits<double>::infinity()) return 0.0;
    return std::sqrt(reference_power * std::pow(10.0, psr_db / 10.0));
}

double reference_power(std::span<const IqSample> samples) {
    if (samples.empty()) throw InputError("reference power needs at least one sample");
    double acc = 0.0;
    for (const auto& s : samples)
        for (double v : s.values) acc += v * v;
    return acc / static_cast<double>(samples.size() * kSampleValues);
}

ClipBounds clip_bounds_of(std::span<const IqSample> samples) {
    if (samples.empty()) throw InputError("clip bounds need at least one sample");
    ClipBounds b{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    for (const auto& s : samples)
        for (double v : s.values) {
            b.low = std::min(b.low, v);
            b.high = std::max(b.high, v);
        }
    return b;
}

namespace {

double sign_of(double g) { return g > 0.0 ? 1.0 : (g < 0.0 ? -1.0 : 0.0); }

IqMatrix signs(const IqMatrix& g) {
    IqMatrix s;
    for (std::size_t k = 0; k < kSampleValues; ++k) s.values[k] = sign_of(g.values[k]);
    return s;
}

IqMatrix scaled(const IqMatrix& s, double epsilon) {
    IqMatrix d;
    for (std::size_t k = 0; k < kSampleValues; ++k) d.values[k] = epsilon * s.values[k];
    return d;
}

IqMatrix weighted_sum(const IqMatrix& g1, const IqMatrix& g2, std::array<double, 2> w) {
    IqMatrix g;
    for (std::size_t k = 0; k < kSampleValues; ++k) g.values[k] = w[0] * g1.values[k] + w[1] * g2.values[k];
    return g;
}

IqMatrix clipped_noise(const IqMatrix& z, double epsilon) {
    IqMatrix d;
    for (std::size_t k = 0; k < kSampleValues; ++k)
        d.values[k] = std::clamp(epsilon * z.values[k], -3.0 * epsilon, 3.0 * epsilon);
    return d;
}

IqMatrix standard_normals(Rng& rng) {
    IqMatrix z;
    for (auto& v : z.values) v = rng.normal();
    return z;
}

void check_epsilon(double epsilon) {
    if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) throw ConfigError("epsilon must be finite and non-negative");
}

const Model& require(const ClassifierPair& models, TargetClassifier t) {
    const Model* m = models.get(t);
    if (m == nullptr) throw ConfigError(std::string("attack needs a trained ") + std::string(target_name(t)));
    return *m;
}

}  // namespace

IqMatrix sign_perturbation(const IqMatrix& gradient, double epsilon) {
    check_epsilon(epsilon);
    return scaled(signs(gradient), epsilon);
}

IqMatrix fgsm_perturbation(const Model& model, const IqSample& x, int label, double epsilon) {
    return sign_perturbation(input_gradient(model, x, label), epsilon);
}

IqMatrix hybrid_perturbation(const Model& model1, const Model& model2, std::array<int, 2> labels,
                             std::array<double, 2> weights, const IqSample& x, double epsilon) {
    if (!(weights[0] >= 0.0) || !(weights[1] >= 0.0) || std::abs(weights[0] + weights[1] - 1.0) > 1e-9)
        throw ConfigError("hybrid weights must be non-negative and sum to 1");
    const IqMatrix g1 = input_gradient(model1, x, labels[0]);
    const IqMatrix g2 = input_gradient(model2, x, labels[1]);
    return sign_perturbation(weighted_sum(g1, g2, weights), epsilon);
}

IqMatrix gaussian_perturbation(double epsilon, Rng& rng) {
    check_epsilon(epsilon);
    return clipped_noise(standard_normals(rng), epsilon);
}

IqSample apply_and_clip(const IqSample& x, const IqMatrix& delta, ClipBounds bounds) {
    if (!(bounds.low <= bounds.high)) throw ConfigError("clip bounds must satisfy low <= high");
    IqSample out;
    for (std::size_t k = 0; k < kSampleValues; ++k)
        out.values[k] = std::clamp(x.values[k] + delta.values[k], bounds.low, bounds.high);
    return out;
}

int target_label(TargetClassifier target, SampleOrigin origin) {
    return target == TargetClassifier::Classifier1 ? legitimacy_label(origin) : device_label(origin);
}

void ConstraintAudit::record(const IqMatrix& delta, double epsilon, const IqSample& adversarial, ClipBounds bounds) {
    ++perturbations;
    for (std::size_t k = 0; k < kSampleValues; ++k) {
        max_budget_excess = std::max(max_budget_excess, std::abs(delta.values[k]) - epsilon);
        if (adversarial.values[k] < bounds.low || adversarial.values[k] > bounds.high) ++clip_violations;
    }
}

SweepRow attack_success_probability(const ClassifierPair& models, const LabeledDataset& dataset,
                                    TargetClassifier target, const AttackSpec& spec, std::uint64_t seed,
                                    ConstraintAudit* audit) {
    spec.validate();
    const Model& victim = require(models, target);
    const Model* m1 = nullptr;
    const Model* m2 = nullptr;
    if (spec.variant == AttackVariant::ForClassifier1 || spec.variant == AttackVariant::Hybrid)
        m1 = &require(models, TargetClassifier::Classifier1);
    if (spec.variant == AttackVariant::ForClassifier2 || spec.variant == AttackVariant::Hybrid)
        m2 = &require(models, TargetClassifier::Classifier2);

    const auto samples = dataset.test_samples();
    const auto origins = dataset.test_origins();
    if (samples.empty()) throw InputError("attack needs a non-empty test split");
    if (origins.size() != samples.size()) throw InputError("attack needs sample origins");

    SweepRow row;
    row.psr_db = spec.psr_db;
    row.variant = spec.variant;
    row.target = target;
    row.dnn = victim.arch();
    row.n_test = samples.size();
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const IqSample& x = samples[i];
        const int l1 = legitimacy_label(origins[i]);
        const int l2 = device_label(origins[i]);
        IqMatrix delta;
        switch (spec.variant) {
            case AttackVariant::ForClassifier1: delta = fgsm_perturbation(*m1, x, l1, spec.epsilon); break;
            case AttackVariant::ForClassifier2: delta = fgsm_perturbation(*m2, x, l2, spec.epsilon); break;
            case AttackVariant::Hybrid:
                delta = hybrid_perturbation(*m1, *m2, {l1, l2}, spec.weights, x, spec.epsilon);
                break;
            case AttackVariant::GaussianNoise: {
                Rng rng = Rng::derive(seed, i);
                delta = gaussian_perturbation(spec.epsilon, rng);
                break;
            }
        }
        const IqSample adv = apply_and_clip(x, delta, spec.clip);
        if (audit != nullptr) audit->record(delta, spec.epsilon, adv, spec.clip);
        if (predict(victim, adv) != target_label(target, origins[i])) ++row.misclassified;
    }
    return row;
}

std::vector<SweepRow> run_attack_sweep(const ClassifierPair& models, const LabeledDataset& dataset, Arch dnn,
                                       const SweepSettings& settings, ConstraintAudit* audit) {
    const Model& c1 = require(models, TargetClassifier::Classifier1);
    const Model& c2 = require(models, TargetClassifier::Classifier2);
    if (settings.psr_grid.empty()) throw ConfigError("PSR grid is empty");
    AttackSpec probe;
    probe.weights = settings.weights;
    probe.clip = settings.clip;
    probe.validate();

    const auto samples = dataset.test_samples();
    const auto origins = dataset.test_origins();
    if (samples.empty()) throw InputError("attack needs a non-empty test split");
    if (origins.size() != samples.size()) throw InputError("attack needs sample origins");

    const std::size_t n = samples.size();
    // Per-variant direction: sign patterns for the three FGSM variants, raw normals for the baseline.
    std::vector<std::array<IqMatrix, 4>> directions(n);
    for (std::size_t i = 0; i < n; ++i) {
        const IqMatrix g1 = input_gradient(c1, samples[i], legitimacy_label(origins[i]));
        const IqMatrix g2 = input_gradient(c2, samples[i], device_label(origins[i]));
        Rng rng = Rng::derive(settings.seed, i);
        directions[i] = {signs(g1), signs(g2), signs(weighted_sum(g1, g2, settings.weights)), standard_normals(rng)};
    }

    std::vector<SweepRow> rows;
    for (double psr : settings.psr_grid) {
        const double eps = psr_to_epsilon(psr, settings.reference_power);
        for (std::size_t v = 0; v < kAllVariants.size(); ++v) {
            std::array<std::size_t, 2> wrong{};
            for (std::size_t i = 0; i < n; ++i) {
                const IqMatrix delta = kAllVariants[v] == AttackVariant::GaussianNoise
                                           ? clipped_noise(directions[i][v], eps)
                                           : scaled(directions[i][v], eps);
                const IqSample adv = apply_and_clip(samples[i], delta, settings.clip);
                if (audit != nullptr) audit->record(delta, eps, adv, settings.clip);
                if (predict(c1, adv) != legitimacy_label(origins[i])) ++wrong[0];
                if (predict(c2, adv) != device_label(origins[i])) ++wrong[1];
            }
            for (std::size_t t = 0; t < kAllTargets.size(); ++t) {
                SweepRow row;
                row.psr_db = psr;
                row.variant = kAllVariants[v];
                row.target = kAllTargets[t];
                row.dnn = dnn;
                row.misclassified = wrong[t];
                row.n_test = n;
                rows.push_back(row);
            }
        }
    }
    return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::string out = "psr_db,variant,target,dnn,success_prob,n_test\n";
    for (const auto& r : rows) {
        out += format_shortest(r.psr_db) + ',' + std::string(variant_name(r.variant)) + ',' +
               std::string(target_name(r.target)) + ',' + std::string(arch_name(r.dnn)) + ',' +
               format_fixed(r.success_probability(), 6) + ',' + std::to_string(r.n_test) + '\n';
    }
    return out;
}

}  // namespace loraadv
