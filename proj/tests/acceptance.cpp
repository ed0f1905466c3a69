// Acceptance report: one PASS/FAIL line per criterion.
//
//   acceptance [--work DIR] [--strict] [--skip-pipeline]
//
// The pipeline criteria run `run-all` twice with the default configuration
// under DIR. Exit status is 0 unless --strict is given and a criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "loraadv/attack.hpp"
#include "loraadv/dataset_io.hpp"
#include "loraadv/harness.hpp"
#include "loraadv/metrics.hpp"
#include "loraadv/spoof.hpp"
#include "oracles.hpp"

using namespace loraadv;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(double v, int d = 4) { return format_fixed(v, d); }

std::vector<double> normals(Rng& r, std::size_t n, double scale) {
    std::vector<double> x(n);
    for (auto& v : x) v = scale * r.normal();
    return x;
}

// --- gradient oracle -------------------------------------------------------

double vec_rel_err(const std::vector<double>& a, const std::vector<double>& n) {
    double diff = 0.0, mag = 1e-8;
    for (std::size_t k = 0; k < a.size(); ++k) {
        diff = std::max(diff, std::abs(a[k] - n[k]));
        mag = std::max({mag, std::abs(a[k]), std::abs(n[k])});
    }
    return diff / mag;
}

Outcome gradient_oracle() {
    const double step = 1e-6;
    Rng r(0x9a0d);
    std::size_t triples = 0, skipped = 0;
    double worst_in = 0.0, worst_param = 0.0;
    for (int attempt = 0; triples < 120 && attempt < 1000; ++attempt) {
        const Arch arch = attempt % 2 == 0 ? Arch::CNN : Arch::FNN;
        Model m = build_model(arch, r.next_u64());
        const auto x = normals(r, kSampleValues, 0.5);
        const int y = static_cast<int>(r.index(2));
        if (min_relu_preactivation(m, x) < 1e-6) {
            ++skipped;
            continue;
        }

        const auto g = input_gradient(m, x, y);
        std::vector<double> fd(kSampleValues);
        for (std::size_t k = 0; k < kSampleValues; ++k) fd[k] = oracle::fd_input(m, x, y, k, step);
        worst_in = std::max(worst_in, vec_rel_err(g, fd));

        ParamGradients pg = zero_gradients(m);
        loss_and_gradients(m, x, y, Mode::Infer, nullptr, &pg, nullptr);
        auto params = m.parameters();
        std::vector<double> analytic, numeric;
        for (int s = 0; s < 24; ++s) {
            const std::size_t t = r.index(params.size());
            const std::size_t i = r.index(params[t].size());
            const double keep = params[t][i];
            params[t][i] = keep + step;
            const bool ok_up = min_relu_preactivation(m, x) >= 1e-6;
            const double up = loss(m, x, y);
            params[t][i] = keep - step;
            const bool ok_down = min_relu_preactivation(m, x) >= 1e-6;
            const double down = loss(m, x, y);
            params[t][i] = keep;
            if (!ok_up || !ok_down) continue;
            analytic.push_back(pg[t][i]);
            numeric.push_back((up - down) / (2 * step));
        }
        worst_param = std::max(worst_param, vec_rel_err(analytic, numeric));
        ++triples;
    }
    const bool pass = triples >= 100 && worst_in < 1e-4 && worst_param < 1e-4;
    return {pass, std::to_string(triples) + " triples (" + std::to_string(skipped) +
                      " near a ReLU kink skipped), max rel err input " + format_shortest(worst_in) + ", params " +
                      format_shortest(worst_param)};
}

// --- KDE oracle ----------------------------------------------------------

Outcome kde_oracle() {
    Rng r(0x4de);
    double worst = 0.0;
    for (int inst = 0; inst < 50; ++inst) {
        const std::size_t n = 1 + r.index(20), d = 1 + r.index(6);
        const double h = 0.2 + r.uniform();
        std::vector<std::vector<double>> obs(n, std::vector<double>(d));
        std::vector<double> flat;
        for (auto& o : obs)
            for (auto& v : o) flat.push_back(v = r.normal());
        const KdeModel m(flat, d, h);
        for (int q = 0; q < 5; ++q) {
            const auto p = normals(r, d, 1.0);
            const double ref = oracle::kde_density(obs, p, h);
            worst = std::max(worst, std::abs(kde_density(m, p) - ref) / ref);
        }
    }

    const KdeModel one({-0.8, 0.1, 0.35, 1.4}, 1, 0.15);
    double integral = 0.0;
    const double step = 1e-3;
    for (double x = -3.0; x < 4.0; x += step) {
        const std::vector<double> a{x}, b{x + step};
        integral += 0.5 * step * (kde_density(one, a) + kde_density(one, b));
    }

    // Draws follow the mixture of N(x_i, h^2): mean = mean(x), var = var(x) + h^2.
    const std::vector<double> pts{-1.0, -0.2, 0.5, 0.6, 2.0, 1.1, -0.4, 0.0, 0.9};
    const std::size_t dim = 3;
    const double h = 0.25;
    const KdeModel mm(pts, dim, h);
    Rng sr(0x5a3);
    const std::size_t draws = 100000;
    const auto sample = kde_sample_points(mm, draws, sr);
    bool moments_ok = true;
    double worst_z = 0.0;
    for (std::size_t j = 0; j < dim; ++j) {
        double mu = 0.0;
        for (std::size_t i = 0; i < mm.size(); ++i) mu += mm.observation(i)[j];
        mu /= static_cast<double>(mm.size());
        double var = 0.0, m4 = 0.0;
        for (std::size_t i = 0; i < mm.size(); ++i) {
            const double c = mm.observation(i)[j] - mu;
            var += c * c + h * h;
            m4 += c * c * c * c + 6 * c * c * h * h + 3 * h * h * h * h;
        }
        var /= static_cast<double>(mm.size());
        m4 /= static_cast<double>(mm.size());
        double s = 0.0, s2 = 0.0;
        for (const auto& p : sample) {
            s += p[j] - mu;
            s2 += (p[j] - mu) * (p[j] - mu);
        }
        const double mean_err = s / draws, var_err = s2 / draws - var;
        const double z_mean = std::abs(mean_err) / std::sqrt(var / draws);
        const double z_var = std::abs(var_err) / std::sqrt((m4 - var * var) / draws);
        worst_z = std::max({worst_z, z_mean, z_var});
        moments_ok = moments_ok && z_mean < 3.0 && z_var < 3.0;
    }

    const bool pass = worst < 1e-10 && std::abs(integral - 1.0) < 1e-3 && moments_ok;
    return {pass, "50 instances max rel err " + format_shortest(worst) + ", 1-D integral " + fmt(integral, 6) +
                      ", moment |z| max " + fmt(worst_z, 2)};
}

// --- JSD suite -------------------------------------------------------------

Outcome jsd_suite() {
    const auto pdf = [](std::vector<double> p) {
        const BinSpec spec{p.size(), 1.0, 1};
        return DiscretePdf(std::move(p), spec);
    };
    const double self = jsd(pdf({0.2, 0.3, 0.5}), pdf({0.2, 0.3, 0.5}));
    const double disjoint = jsd(pdf({1.0, 0.0}), pdf({0.0, 1.0}));
    bool symmetric = true;
    Rng r(0x75d);
    for (int t = 0; t < 100; ++t) {
        std::vector<double> p(16), q(16);
        double sp = 0.0, sq = 0.0;
        for (std::size_t i = 0; i < 16; ++i) {
            sp += (p[i] = r.uniform() < 0.2 ? 0.0 : r.uniform());
            sq += (q[i] = r.uniform());
        }
        for (std::size_t i = 0; i < 16; ++i) {
            p[i] /= sp;
            q[i] /= sq;
        }
        symmetric = symmetric && jsd(pdf(p), pdf(q)) == jsd(pdf(q), pdf(p));
    }
    const double kl = kl_divergence(pdf({0.5, 0.5}), pdf({0.25, 0.75}));
    const bool pass =
        self == 0.0 && std::abs(disjoint - 1.0) < 1e-12 && symmetric && std::abs(kl - 0.2075) < 1e-4 &&
        std::abs(kl - oracle::kl_bits({0.5, 0.5}, {0.25, 0.75})) < 1e-6;
    return {pass, "jsd(p,p) " + format_shortest(self) + ", jsd(disjoint) " + format_shortest(disjoint) +
                      ", symmetric " + (symmetric ? "yes" : "no") + ", KL example " + fmt(kl, 6) + " bits"};
}

// --- FGSM optimality -------------------------------------------------------

Outcome fgsm_optimality() {
    Rng r(0xf65);
    std::size_t optimal = 0;
    double worst_gap = 0.0;
    for (int inst = 0; inst < 20; ++inst) {
        const Model m = build_model(inst % 2 == 0 ? Arch::FNN : Arch::CNN, r.next_u64());
        IqSample x;
        for (auto& v : x.values) v = 0.5 * r.normal();
        const int y = static_cast<int>(r.index(2));
        const double eps = 0.01 + 0.1 * r.uniform();
        std::vector<std::size_t> active;
        while (active.size() < 8) {
            const std::size_t k = r.index(kSampleValues);
            if (std::find(active.begin(), active.end(), k) == active.end()) active.push_back(k);
        }
        const IqMatrix g = input_gradient(m, x, y);
        const IqMatrix d = fgsm_perturbation(m, x, y, eps);
        // Linearized loss gain g . delta over the 8 free components, others held at zero.
        double fgsm_gain = 0.0;
        for (auto k : active) fgsm_gain += g.values[k] * d.values[k];
        double best = -1.0;
        for (int code = 0; code < 6561; ++code) {
            int c = code;
            double gain = 0.0;
            for (auto k : active) {
                gain += g.values[k] * eps * static_cast<double>(c % 3 - 1);
                c /= 3;
            }
            best = std::max(best, gain);
        }
        const double gap = best - fgsm_gain;
        worst_gap = std::max(worst_gap, gap);
        if (gap <= 1e-15 * std::max(1.0, std::abs(best))) ++optimal;
    }
    return {optimal == 20, std::to_string(optimal) + "/20 instances at the 3^8 brute-force maximum, worst gap " +
                               format_shortest(worst_gap)};
}

// --- pipeline criteria -----------------------------------------------------

std::vector<std::vector<std::string>> read_csv(const fs::path& path) {
    std::istringstream in(read_file(path));
    std::vector<std::vector<std::string>> rows;
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        rows.push_back(cells);
    }
    return rows;
}

Outcome classifier_quality(const ExperimentConfig& c) {
    std::map<std::pair<Task, Arch>, double> acc;
    bool all = true;
    double lowest = 1.0;
    for (Task t : kAllTasks)
        for (Arch a : kPipelineArchs) {
            const Json rep = Json::parse(read_file(report_path(c, t, a)));
            const double v = rep.at("average").get<double>();
            acc[{t, a}] = v;
            lowest = std::min(lowest, v);
            all = all && v >= 0.85;
        }
    bool order = true;
    std::string detail = "min accuracy " + fmt(lowest);
    for (Arch a : kPipelineArchs) {
        const double lvr = acc[{Task::LegitVsRogue, a}], mixed = acc[{Task::DeviceIdMixed, a}];
        order = order && lvr > mixed;
        detail += std::string(", ") + std::string(arch_name(a)) + " LvR " + fmt(lvr) + " vs Mixed " + fmt(mixed);
    }
    return {all && order, detail};
}

Outcome spoof_fidelity_check(const ExperimentConfig& c) {
    bool pass = true;
    std::string detail;
    for (const auto& row : read_csv(c.output_dir / "spoof" / "jsd.csv")) {
        if (row[0] == "average") continue;
        const double v = std::stod(row[1]);
        pass = pass && v < 0.05;
        detail += (detail.empty() ? "" : ", ") + row[0] + " " + fmt(v) + " bits";
    }
    return {pass, detail + " (threshold 0.05)"};
}

Outcome attack_ordering(const ExperimentConfig& c) {
    std::map<std::string, double> p;
    for (const auto& row : read_csv(c.output_dir / "attack" / "sweep.csv"))
        if (std::stod(row[0]) == -10.0) p[row[3] + "/" + row[2] + "/" + row[1]] = std::stod(row[4]);
    if (p.empty()) return {false, "no rows at -10 dB"};
    bool pass = true;
    std::string detail;
    for (Arch a : kPipelineArchs)
        for (TargetClassifier t : kAllTargets) {
            const std::string key = std::string(arch_name(a)) + "/" + std::string(target_name(t)) + "/";
            const bool c1 = t == TargetClassifier::Classifier1;
            const double matched = p[key + (c1 ? "fgsm-c1" : "fgsm-c2")];
            const double mismatched = p[key + (c1 ? "fgsm-c2" : "fgsm-c1")];
            const double gauss = p[key + "gaussian"];
            const double hybrid = p[key + "hybrid"];
            const bool ok_m = matched >= mismatched, ok_g = matched >= gauss + 0.2,
                       ok_h = std::abs(hybrid - matched) <= 0.15;
            pass = pass && ok_m && ok_g && ok_h;
            detail += (detail.empty() ? "" : "; ") + key.substr(0, key.size() - 1) + " matched " + fmt(matched, 3) +
                      " mismatched " + fmt(mismatched, 3) + (ok_m ? "" : "!") + " gaussian " + fmt(gauss, 3) +
                      (ok_g ? "" : "!") + " hybrid " + fmt(hybrid, 3) + (ok_h ? "" : "!");
        }
    return {pass, detail};
}

Outcome constraint_suite(const ExperimentConfig& c) {
    const LabeledDataset pool = load_dataset(dataset_dir(c, Task::LegitVsRogue)).dataset;
    std::vector<IqSample> legit_test;
    for (std::size_t i = pool.n_train; i < pool.size(); ++i)
        if (pool.origins[i].legitimacy == Legitimacy::Legitimate) legit_test.push_back(pool.samples[i]);
    const double ref = reference_power(legit_test);
    const ClipBounds clip = clip_bounds_of(pool.samples);
    const auto samples = pool.test_samples();
    const auto origins = pool.test_origins();

    std::map<AttackVariant, std::size_t> budget_breaks;
    std::map<AttackVariant, double> worst_ratio;
    std::size_t clip_breaks = 0, checked = 0;
    for (Arch a : kPipelineArchs) {
        const Model m1 = model_from_json(Json::parse(read_file(model_path(c, Task::LegitVsRogue, a))));
        const Model m2 = model_from_json(Json::parse(read_file(model_path(c, Task::DeviceIdMixed, a))));
        const std::uint64_t seed = attack_seed(c, a);
        for (double psr : c.psr_grid) {
            const double eps = psr_to_epsilon(psr, ref);
            for (std::size_t i = 0; i < samples.size(); ++i) {
                const int l1 = legitimacy_label(origins[i]), l2 = device_label(origins[i]);
                for (AttackVariant v : kAllVariants) {
                    IqMatrix delta;
                    switch (v) {
                        case AttackVariant::ForClassifier1: delta = fgsm_perturbation(m1, samples[i], l1, eps); break;
                        case AttackVariant::ForClassifier2: delta = fgsm_perturbation(m2, samples[i], l2, eps); break;
                        case AttackVariant::Hybrid:
                            delta = hybrid_perturbation(m1, m2, {l1, l2}, c.weights, samples[i], eps);
                            break;
                        case AttackVariant::GaussianNoise: {
                            Rng rng = Rng::derive(seed, i);
                            delta = gaussian_perturbation(eps, rng);
                            break;
                        }
                    }
                    double linf = 0.0;
                    for (double d : delta.values) linf = std::max(linf, std::abs(d));
                    if (linf > eps) ++budget_breaks[v];
                    worst_ratio[v] = std::max(worst_ratio[v], linf / eps);
                    const IqSample adv = apply_and_clip(samples[i], delta, clip);
                    for (double z : adv.values)
                        if (z < clip.low || z > clip.high) ++clip_breaks;
                    ++checked;
                }
            }
        }
    }
    bool pass = clip_breaks == 0;
    std::string detail = std::to_string(checked) + " perturbations; ";
    for (AttackVariant v : kAllVariants) {
        pass = pass && budget_breaks[v] == 0;
        detail += std::string(variant_name(v)) + " max |d|/eps " + fmt(worst_ratio[v], 3) + " (" +
                  std::to_string(budget_breaks[v]) + " over budget), ";
    }
    return {pass, detail + std::to_string(clip_breaks) + " clip violations"};
}

Outcome determinism(const fs::path& a, const fs::path& b) {
    std::size_t compared = 0, differing = 0;
    std::string first;
    for (const auto& e : fs::recursive_directory_iterator(a)) {
        if (!e.is_regular_file()) continue;
        const fs::path rel = fs::relative(e.path(), a);
        const auto ext = rel.extension();
        if (ext != ".csv" && ext != ".json") continue;
        ++compared;
        if (!fs::exists(b / rel) || read_file(e.path()) != read_file(b / rel)) {
            ++differing;
            if (first.empty()) first = rel.generic_string();
        }
    }
    return {compared > 0 && differing == 0,
            std::to_string(compared) + " CSV/JSON artifacts compared, " + std::to_string(differing) + " differ" +
                (first.empty() ? "" : " (first: " + first + ")")};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"acceptance report"};
    std::string work = "acceptance_work";
    bool strict = false, skip_pipeline = false;
    app.add_option("--work", work, "scratch directory for the pipeline runs");
    app.add_flag("--strict", strict, "exit non-zero when any criterion fails");
    app.add_flag("--skip-pipeline", skip_pipeline, "only the criteria that need no full run");
    CLI11_PARSE(app, argc, argv);

    std::size_t passed = 0, total = 0;
    const auto report = [&](const std::string& name, const std::function<Outcome()>& fn) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        ++total;
        passed += o.pass;
        std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail << " [" << fmt(secs, 1) << " s]"
                  << std::endl;
    };

    report("parameter counts", [] {
        const auto fnn = count_parameters(build_model(Arch::FNN, 1));
        const auto cnn = count_parameters(build_model(Arch::CNN, 1));
        return Outcome{fnn == 6522 && cnn == 61882,
                       "FNN " + std::to_string(fnn) + " (want 6522), CNN " + std::to_string(cnn) + " (want 61882)"};
    });
    report("gradient oracle", gradient_oracle);
    report("KDE oracle", kde_oracle);
    report("JSD analytic suite", jsd_suite);

    if (!skip_pipeline) {
        ExperimentConfig first, second;
        first.output_dir = fs::path(work) / "run1";
        second.output_dir = fs::path(work) / "run2";
        std::string run_error;
        try {
            fs::remove_all(work);
            std::ostringstream log;
            const auto t0 = std::chrono::steady_clock::now();
            cmd_run_all(first, log);
            cmd_run_all(second, log);
            const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            std::cout << "pipeline: two default run-all passes in " << fmt(secs, 1) << " s" << std::endl;
        } catch (const std::exception& e) {
            run_error = e.what();
            std::cout << "pipeline failed: " << run_error << std::endl;
        }
        report("classifier quality", [&] { return classifier_quality(first); });
        report("spoof fidelity", [&] { return spoof_fidelity_check(first); });
        report("attack ordering at -10 dB", [&] { return attack_ordering(first); });
        report("FGSM optimality", fgsm_optimality);
        report("constraint suite", [&] { return constraint_suite(first); });
        report("determinism", [&] { return determinism(first.output_dir, second.output_dir); });
    } else {
        report("FGSM optimality", fgsm_optimality);
    }

    std::cout << passed << "/" << total << " criteria passed" << std::endl;
    return strict && passed != total ? 1 : 0;
}
