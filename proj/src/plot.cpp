#include "loraadv/plot.hpp"

#include <algorithm>

#include "loraadv/error.hpp"
#include "loraadv/io.hpp"

namespace loraadv {

namespace {

constexpr double kWidth = 640, kHeight = 420;
constexpr double kLeft = 64, kRight = 170, kTop = 40, kBottom = 56;

const char* colour(AttackVariant v) {
    switch (v) {
        case AttackVariant::ForClassifier1: return "#1f77b4";
        case AttackVariant::ForClassifier2: return "#ff7f0e";
        case AttackVariant::Hybrid: return "#2ca02c";
        case AttackVariant::GaussianNoise: return "#7f7f7f";
    }
    return "#000000";
}

const char* label(AttackVariant v) {
    switch (v) {
        case AttackVariant::ForClassifier1: return "FGSM for classifier 1";
        case AttackVariant::ForClassifier2: return "FGSM for classifier 2";
        case AttackVariant::Hybrid: return "Hybrid";
        case AttackVariant::GaussianNoise: return "Gaussian noise";
    }
    return "?";
}

std::string num(double v) { return format_fixed(v, 2); }

}  // namespace

std::string success_plot_svg(const std::vector<SweepRow>& rows, TargetClassifier target, Arch dnn) {
    std::vector<const SweepRow*> mine;
    for (const auto& r : rows)
        if (r.target == target && r.dnn == dnn) mine.push_back(&r);
    if (mine.empty()) throw InputError("no sweep rows for the requested plot");
    double lo = mine.front()->psr_db, hi = lo;
    for (const auto* r : mine) {
        lo = std::min(lo, r->psr_db);
        hi = std::max(hi, r->psr_db);
    }
    if (hi == lo) hi = lo + 1.0;

    const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
    auto px = [&](double psr) { return kLeft + (psr - lo) / (hi - lo) * pw; };
    auto py = [&](double p) { return kTop + (1.0 - p) * ph; };

    const int n = target == TargetClassifier::Classifier1 ? 1 : 2;
    std::string s;
    s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) + "\" height=\"" + num(kHeight) +
         "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    s += "<text x=\"" + num(kLeft + pw / 2) + "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">Untargeted attack on " +
         std::string(arch_name(dnn)) + " classifier " + std::to_string(n) + "</text>\n";
    s += "<rect x=\"" + num(kLeft) + "\" y=\"" + num(kTop) + "\" width=\"" + num(pw) + "\" height=\"" + num(ph) +
         "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int k = 0; k <= 5; ++k) {
        const double p = k / 5.0;
        s += "<line x1=\"" + num(kLeft - 4) + "\" y1=\"" + num(py(p)) + "\" x2=\"" + num(kLeft + pw) + "\" y2=\"" +
             num(py(p)) + "\" stroke=\"#dddddd\"/>\n";
        s += "<text x=\"" + num(kLeft - 8) + "\" y=\"" + num(py(p) + 4) + "\" text-anchor=\"end\">" +
             format_fixed(p, 1) + "</text>\n";
    }
    std::vector<double> ticks;
    for (const auto* r : mine)
        if (std::find(ticks.begin(), ticks.end(), r->psr_db) == ticks.end()) ticks.push_back(r->psr_db);
    const std::size_t stride = std::max<std::size_t>(1, ticks.size() / 8);
    for (std::size_t k = 0; k < ticks.size(); k += stride) {
        s += "<text x=\"" + num(px(ticks[k])) + "\" y=\"" + num(kTop + ph + 18) + "\" text-anchor=\"middle\">" +
             format_shortest(ticks[k]) + "</text>\n";
    }
    s += "<text x=\"" + num(kLeft + pw / 2) + "\" y=\"" + num(kHeight - 14) +
         "\" text-anchor=\"middle\">PSR (dB)</text>\n";
    s += "<text transform=\"translate(18," + num(kTop + ph / 2) +
         ") rotate(-90)\" text-anchor=\"middle\">Attack success probability</text>\n";

    int slot = 0;
    for (auto v : kAllVariants) {
        std::string pts;
        for (const auto* r : mine) {
            if (r->variant != v) continue;
            if (!pts.empty()) pts += ' ';
            pts += num(px(r->psr_db)) + ',' + num(py(r->success_probability()));
        }
        if (pts.empty()) continue;
        s += "<polyline fill=\"none\" stroke=\"" + std::string(colour(v)) + "\" stroke-width=\"2\" points=\"" + pts +
             "\"/>\n";
        const double ly = kTop + 12 + 20 * slot++;
        s += "<line x1=\"" + num(kLeft + pw + 12) + "\" y1=\"" + num(ly) + "\" x2=\"" + num(kLeft + pw + 32) +
             "\" y2=\"" + num(ly) + "\" stroke=\"" + colour(v) + "\" stroke-width=\"2\"/>\n";
        s += "<text x=\"" + num(kLeft + pw + 36) + "\" y=\"" + num(ly + 4) + "\">" + label(v) + "</text>\n";
    }
    s += "</svg>\n";
    return s;
}

}  // namespace loraadv
