#pragma once

// FGSM perturbations (single-classifier and weighted hybrid), the Gaussian
// noise baseline, input-range clipping, and attack success measurement.

#include <array>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "loraadv/nn.hpp"
#include "loraadv/random.hpp"
#include "loraadv/signal.hpp"

namespace loraadv {

enum class AttackVariant { ForClassifier1, ForClassifier2, Hybrid, GaussianNoise };
/// Classifier1 separates legitimate from rogue; Classifier2 separates Device 1 from Device 2.
enum class TargetClassifier { Classifier1, Classifier2 };

inline constexpr std::array<AttackVariant, 4> kAllVariants = {
    AttackVariant::ForClassifier1, AttackVariant::ForClassifier2, AttackVariant::Hybrid, AttackVariant::GaussianNoise};
inline constexpr std::array<TargetClassifier, 2> kAllTargets = {TargetClassifier::Classifier1,
                                                                TargetClassifier::Classifier2};

std::string_view variant_name(AttackVariant v);
std::string_view target_name(TargetClassifier t);
AttackVariant parse_variant(std::string_view text);

struct ClipBounds {
    double low = -1.0;
    double high = 1.0;
};

/// The perturbation budget is an infinity-norm bound: every |delta_k| <= epsilon.
struct AttackSpec {
    AttackVariant variant = AttackVariant::ForClassifier1;
    double psr_db = -10.0;
    std::array<double, 2> weights{0.5, 0.5};
    double epsilon = 0.0;
    ClipBounds clip;

    void validate() const;
};

/// epsilon = sqrt(reference_power * 10^(psr_db/10)); psr_db = -inf gives 0.
double psr_to_epsilon(double psr_db, double reference_power);

/// Mean squared value per matrix component.
double reference_power(std::span<const IqSample> samples);

/// Global (min, max) over every component of `samples`.
ClipBounds clip_bounds_of(std::span<const IqSample> samples);

/// epsilon * sign(g) with sign(0) = 0.
IqMatrix sign_perturbation(const IqMatrix& gradient, double epsilon);

IqMatrix fgsm_perturbation(const Model& model, const IqSample& x, int label, double epsilon);

/// epsilon * sign(w1 * dL1/dx + w2 * dL2/dx).
IqMatrix hybrid_perturbation(const Model& model1, const Model& model2, std::array<int, 2> labels,
                             std::array<double, 2> weights, const IqSample& x, double epsilon);

/// Independent N(0, epsilon^2) entries clipped to [-3 epsilon, 3 epsilon].
IqMatrix gaussian_perturbation(double epsilon, Rng& rng);

IqSample apply_and_clip(const IqSample& x, const IqMatrix& delta, ClipBounds bounds);

struct ClassifierPair {
    const Model* classifier1 = nullptr;
    const Model* classifier2 = nullptr;

    const Model* get(TargetClassifier t) const { return t == TargetClassifier::Classifier1 ? classifier1 : classifier2; }
};

/// True label of a sample under each classifier's task.
int target_label(TargetClassifier target, SampleOrigin origin);

struct SweepRow {
    double psr_db = 0.0;
    AttackVariant variant = AttackVariant::ForClassifier1;
    TargetClassifier target = TargetClassifier::Classifier1;
    Arch dnn = Arch::CNN;
    std::size_t misclassified = 0;
    std::size_t n_test = 0;

    double success_probability() const {
        return n_test == 0 ? 0.0 : static_cast<double>(misclassified) / static_cast<double>(n_test);
    }
};

/// Largest observed |delta_k| - epsilon and count of adversarial components
/// outside the clip bounds, accumulated over every generated input.
struct ConstraintAudit {
    double max_budget_excess = -std::numeric_limits<double>::infinity();
    std::size_t clip_violations = 0;
    std::size_t perturbations = 0;

    void record(const IqMatrix& delta, double epsilon, const IqSample& adversarial, ClipBounds bounds);
};

/// White-box attack over the test split of `dataset`: each sample is perturbed
/// per `spec` using its true labels, clipped, and classified by the target.
/// Gaussian draws come from sub-streams derived from (seed, sample index).
SweepRow attack_success_probability(const ClassifierPair& models, const LabeledDataset& dataset,
                                    TargetClassifier target, const AttackSpec& spec, std::uint64_t seed,
                                    ConstraintAudit* audit = nullptr);

struct SweepSettings {
    std::vector<double> psr_grid;
    std::array<double, 2> weights{0.5, 0.5};
    double reference_power = 1.0;
    ClipBounds clip;
    std::uint64_t seed = 0;
};

/// Rows ordered by PSR, then variant, then target. Input gradients are computed
/// once per sample; results equal per-row attack_success_probability calls.
std::vector<SweepRow> run_attack_sweep(const ClassifierPair& models, const LabeledDataset& dataset, Arch dnn,
                                       const SweepSettings& settings, ConstraintAudit* audit = nullptr);

/// `psr_db,variant,target,dnn,success_prob,n_test` with 6-decimal success values.
std::string sweep_csv(const std::vector<SweepRow>& rows);

}  // namespace loraadv
