#include "loraadv/harness.hpp"

#include <cmath>
#include <map>
#include <ostream>

#include "loraadv/dataset_io.hpp"
#include "loraadv/error.hpp"
#include "loraadv/metrics.hpp"
#include "loraadv/plot.hpp"
#include "loraadv/spoof.hpp"

namespace loraadv {

namespace fs = std::filesystem;

std::vector<double> default_psr_grid() {
    std::vector<double> grid;
    for (int db = -30; db <= 0; db += 2) grid.push_back(db);
    return grid;
}

void ExperimentConfig::validate() const {
    chirp.validate();
    train.validate();
    for (const auto& p : profiles) p.validate();
    for (int code = 0; code < 4; ++code) find_profile(profiles, SampleOrigin::decode(static_cast<std::uint8_t>(code)));
    for (std::size_t t : totals)
        if (t < 10) throw ConfigError("every task total must be at least 10");
    if (!(kde_bandwidth > 0.0) || !std::isfinite(kde_bandwidth)) throw ConfigError("kde_bandwidth must be positive");
    if (psr_grid.empty()) throw ConfigError("psr_grid is empty");
    for (std::size_t i = 0; i < psr_grid.size(); ++i) {
        if (!std::isfinite(psr_grid[i])) throw ConfigError("psr_grid values must be finite");
        if (i > 0 && !(psr_grid[i] > psr_grid[i - 1])) throw ConfigError("psr_grid must be strictly increasing");
    }
    AttackSpec probe;
    probe.weights = weights;
    probe.validate();
    if (output_dir.empty()) throw ConfigError("output_dir is empty");
}

Json to_json(const TrainConfig& c) {
    return Json{{"learning_rate", c.learning_rate}, {"batch_size", c.batch_size},   {"epochs", c.epochs},
                {"adam_beta1", c.adam_beta1},       {"adam_beta2", c.adam_beta2},   {"adam_epsilon", c.adam_epsilon}};
}

TrainConfig train_config_from_json(const Json& doc) {
    reject_unknown_keys(doc, {"learning_rate", "batch_size", "epochs", "adam_beta1", "adam_beta2", "adam_epsilon"},
                        "train");
    TrainConfig c;
    c.learning_rate = doc.value("learning_rate", c.learning_rate);
    c.batch_size = doc.value("batch_size", c.batch_size);
    c.epochs = doc.value("epochs", c.epochs);
    c.adam_beta1 = doc.value("adam_beta1", c.adam_beta1);
    c.adam_beta2 = doc.value("adam_beta2", c.adam_beta2);
    c.adam_epsilon = doc.value("adam_epsilon", c.adam_epsilon);
    c.validate();
    return c;
}

Json to_json(const ExperimentConfig& c) {
    Json profiles = Json::array();
    for (const auto& p : c.profiles) profiles.push_back(to_json(p));
    Json totals = Json::object();
    for (Task t : kAllTasks) totals[std::string(task_slug(t))] = c.total(t);
    return Json{{"seed", c.seed},
                {"chirp", to_json(c.chirp)},
                {"profiles", profiles},
                {"totals", totals},
                {"train", to_json(c.train)},
                {"kde_bandwidth", c.kde_bandwidth},
                {"psr_grid", c.psr_grid},
                {"weights", c.weights}};
}

ExperimentConfig config_from_json(const Json& doc) {
    if (!doc.is_object()) throw ConfigError("config must be a JSON object");
    reject_unknown_keys(doc,
                        {"seed", "chirp", "profiles", "totals", "train", "kde_bandwidth", "psr_grid", "weights",
                         "output_dir"},
                        "config");
    ExperimentConfig c;
    c.seed = doc.value("seed", c.seed);
    if (doc.contains("chirp")) c.chirp = chirp_from_json(doc.at("chirp"));
    if (doc.contains("profiles")) {
        c.profiles.clear();
        for (const auto& p : doc.at("profiles")) c.profiles.push_back(profile_from_json(p));
    }
    if (doc.contains("totals")) {
        const Json& t = doc.at("totals");
        if (!t.is_object()) throw ConfigError("totals must be an object keyed by task");
        for (const auto& [key, value] : t.items()) c.totals[static_cast<std::size_t>(parse_task(key))] = value.get<std::size_t>();
    }
    if (doc.contains("train")) c.train = train_config_from_json(doc.at("train"));
    c.kde_bandwidth = doc.value("kde_bandwidth", c.kde_bandwidth);
    if (doc.contains("psr_grid")) c.psr_grid = doc.at("psr_grid").get<std::vector<double>>();
    if (doc.contains("weights")) {
        const auto w = doc.at("weights").get<std::vector<double>>();
        if (w.size() != 2) throw ConfigError("weights must hold exactly two values");
        c.weights = {w[0], w[1]};
    }
    if (doc.contains("output_dir")) c.output_dir = doc.at("output_dir").get<std::string>();
    c.validate();
    return c;
}

ExperimentConfig load_config(const fs::path& path) {
    Json doc;
    try {
        doc = Json::parse(read_file(path));
    } catch (const Json::parse_error& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
    return config_from_json(doc);
}

namespace {

std::string arch_slug(Arch a) { return a == Arch::CNN ? "cnn" : "fnn"; }

std::string stem(Task task, Arch arch) { return std::string(task_slug(task)) + "_" + arch_slug(arch); }

std::vector<Task> tasks_of(std::optional<Task> t) {
    if (t) return {*t};
    return {kAllTasks.begin(), kAllTasks.end()};
}

std::vector<Arch> archs_of(std::optional<Arch> a) {
    if (a) {
        if (*a == Arch::Custom) throw ConfigError("only CNN and FNN classifiers are part of the pipeline");
        return {*a};
    }
    return {kPipelineArchs.begin(), kPipelineArchs.end()};
}

std::uint64_t sub_seed(const ExperimentConfig& c, std::uint64_t stream) { return Rng::derive(c.seed, stream).next_u64(); }

std::uint64_t task_arch_code(Task t, Arch a) { return 16 * static_cast<std::uint64_t>(t) + static_cast<std::uint64_t>(a); }

LabeledDataset load_task(const ExperimentConfig& c, Task t) {
    const fs::path dir = dataset_dir(c, t);
    if (!fs::exists(dir / "meta.json"))
        throw InputError("missing dataset cache " + dir.string() + " (run gen-data first)");
    LabeledDataset ds = load_dataset(dir).dataset;
    if (ds.task != t) throw InputError(dir.string() + " holds a different task");
    return ds;
}

Model load_model(const ExperimentConfig& c, Task t, Arch a) {
    const fs::path path = model_path(c, t, a);
    if (!fs::exists(path)) throw InputError("missing model " + path.string() + " (run train first)");
    return model_from_json(Json::parse(read_file(path)));
}

void write_report(const ExperimentConfig& c, Task t, Arch a, const AccuracyReport& r, std::ostream& log) {
    write_file_atomic(report_path(c, t, a), dump_json(accuracy_report_json(t, a, r)));
    log << task_name(t) << ' ' << arch_name(a) << ": average accuracy " << format_fixed(r.average, 4) << '\n';
}

// Collects every report present on disk into one table.
void write_accuracy_table(const ExperimentConfig& c) {
    std::string csv = "task,arch,average,class0,accuracy0,class1,accuracy1,n_test\n";
    bool any = false;
    for (Task t : kAllTasks) {
        for (Arch a : kPipelineArchs) {
            const fs::path path = report_path(c, t, a);
            if (!fs::exists(path)) continue;
            const Json r = Json::parse(read_file(path));
            const std::string c0(class_name(t, 0)), c1(class_name(t, 1));
            csv += std::string(task_name(t)) + ',' + std::string(arch_name(a)) + ',' +
                   format_fixed(r.at("average").get<double>(), 4) + ',' + c0 + ',' +
                   format_fixed(r.at("detect-" + c0).get<double>(), 4) + ',' + c1 + ',' +
                   format_fixed(r.at("detect-" + c1).get<double>(), 4) + ',' +
                   std::to_string(r.at("n_test").get<std::size_t>()) + '\n';
            any = true;
        }
    }
    if (any) write_file_atomic(c.output_dir / "reports" / "accuracy.csv", csv);
}

std::string constellation_csv(const std::vector<IqSample>& samples, std::size_t count) {
    std::string csv = "i,q\n";
    for (std::size_t s = 0; s < std::min(count, samples.size()); ++s)
        for (std::size_t k = 0; k < kWindowLength; ++k) {
            const Complex z = samples[s].point(k);
            csv += format_shortest(z.real()) + ',' + format_shortest(z.imag()) + '\n';
        }
    return csv;
}

struct OriginPools {
    std::map<std::uint8_t, std::vector<IqSample>> by_origin;

    const std::vector<IqSample>& get(DeviceId d, Legitimacy l) const {
        static const std::vector<IqSample> empty;
        const auto it = by_origin.find(SampleOrigin{d, l}.encode());
        return it == by_origin.end() ? empty : it->second;
    }
};

OriginPools pool_by_origin(const std::vector<LabeledDataset>& datasets) {
    OriginPools pools;
    for (const auto& ds : datasets)
        for (std::size_t i = 0; i < ds.size(); ++i) pools.by_origin[ds.origins[i].encode()].push_back(ds.samples[i]);
    return pools;
}

}  // namespace

fs::path dataset_dir(const ExperimentConfig& c, Task t) { return c.output_dir / "data" / std::string(task_slug(t)); }

fs::path model_path(const ExperimentConfig& c, Task t, Arch a) { return c.output_dir / "models" / (stem(t, a) + ".json"); }

fs::path report_path(const ExperimentConfig& c, Task t, Arch a) { return c.output_dir / "reports" / (stem(t, a) + ".json"); }

std::uint64_t model_init_seed(const ExperimentConfig& c, Task t, Arch a) { return sub_seed(c, 0x2000 + task_arch_code(t, a)); }

std::uint64_t train_seed(const ExperimentConfig& c, Task t, Arch a) { return sub_seed(c, 0x3000 + task_arch_code(t, a)); }

std::uint64_t attack_seed(const ExperimentConfig& c, Arch a) { return sub_seed(c, 0x4000 + static_cast<std::uint64_t>(a)); }

LabeledDataset generate_task_dataset(const ExperimentConfig& c, Task t) {
    Rng rng = Rng::derive(c.seed, 0x1000 + static_cast<std::uint64_t>(t));
    if (t == Task::DeviceIdLegit) return build_dataset(t, c.profiles, c.chirp, c.total(t), rng);
    return build_spoofed_dataset(t, c.profiles, c.chirp, c.total(t), c.kde_bandwidth, rng);
}

Json accuracy_report_json(Task t, Arch a, const AccuracyReport& r) {
    Json doc = to_json(r);
    doc["task"] = task_name(t);
    doc["arch"] = arch_name(a);
    doc["n_test"] = r.total();
    doc["detect-" + std::string(class_name(t, 0))] = r.per_class[0];
    doc["detect-" + std::string(class_name(t, 1))] = r.per_class[1];
    return doc;
}

std::vector<JsdRow> spoof_fidelity(const std::vector<LabeledDataset>& datasets) {
    const OriginPools pools = pool_by_origin(datasets);
    std::vector<JsdRow> rows;
    for (DeviceId d : {DeviceId::Device1, DeviceId::Device2}) {
        const auto& legit = pools.get(d, Legitimacy::Legitimate);
        const auto& spoofed = pools.get(d, Legitimacy::Rogue);
        if (legit.empty() || spoofed.empty())
            throw InputError("spoof report needs legitimate and spoofed samples of " + std::string(device_name(d)));
        const BinSpec spec = shared_bin_spec(legit, spoofed);
        rows.push_back({d, jsd(histogram_pdf(legit, spec), histogram_pdf(spoofed, spec)), spec.bins, spec.range});
    }
    return rows;
}

std::string jsd_csv(const std::vector<JsdRow>& rows) {
    std::string csv = "device,jsd_bits,n_bins,range\n";
    double sum = 0.0;
    for (const auto& r : rows) {
        csv += std::string(device_name(r.device)) + ',' + format_shortest(r.jsd_bits) + ',' + std::to_string(r.n_bins) +
               ',' + format_shortest(r.range) + '\n';
        sum += r.jsd_bits;
    }
    if (!rows.empty()) {
        csv += "average," + format_shortest(sum / static_cast<double>(rows.size())) + ',' +
               std::to_string(rows.front().n_bins) + ",\n";
    }
    return csv;
}

void cmd_gen_data(const ExperimentConfig& c, std::ostream& log) {
    c.validate();
    for (Task t : kAllTasks) {
        const LabeledDataset ds = generate_task_dataset(c, t);
        DatasetMeta meta;
        meta.seed = c.seed;
        meta.config = c.chirp;
        Json sources = Json::array();
        for (const auto& [origin, count] : origin_counts(t, c.total(t))) {
            sources.push_back(find_profile(c.profiles, origin).name());
            (void)count;
        }
        meta.extra["source_profiles"] = sources;
        if (t != Task::DeviceIdLegit) meta.extra["kde_bandwidth"] = c.kde_bandwidth;
        save_dataset(dataset_dir(c, t), ds, meta);
        log << "wrote " << dataset_dir(c, t).string() << " (" << ds.n_train << " train, " << ds.n_test() << " test)\n";
    }
}

void cmd_train(const ExperimentConfig& c, std::optional<Task> task, std::optional<Arch> arch, std::ostream& log) {
    c.validate();
    for (Task t : tasks_of(task)) {
        const LabeledDataset ds = load_task(c, t);
        for (Arch a : archs_of(arch)) {
            Model model = build_model(a, model_init_seed(c, t, a));
            TrainConfig tc = c.train;
            tc.seed = train_seed(c, t, a);
            const TrainResult result = train(model, ds, tc);
            write_file_atomic(model_path(c, t, a), dump_json(model_to_json(model)));
            std::string loss = "epoch,loss\n";
            for (std::size_t e = 0; e < result.epoch_loss.size(); ++e)
                loss += std::to_string(e + 1) + ',' + format_shortest(result.epoch_loss[e]) + '\n';
            write_file_atomic(c.output_dir / "reports" / (stem(t, a) + "_loss.csv"), loss);
            write_report(c, t, a, evaluate_classifier(model, ds), log);
        }
    }
    write_accuracy_table(c);
}

void cmd_eval(const ExperimentConfig& c, std::optional<Task> task, std::optional<Arch> arch, std::ostream& log) {
    c.validate();
    for (Task t : tasks_of(task)) {
        const LabeledDataset ds = load_task(c, t);
        for (Arch a : archs_of(arch)) write_report(c, t, a, evaluate_classifier(load_model(c, t, a), ds), log);
    }
    write_accuracy_table(c);
}

void cmd_spoof_report(const ExperimentConfig& c, std::ostream& log) {
    c.validate();
    std::vector<LabeledDataset> datasets;
    for (Task t : kAllTasks) datasets.push_back(load_task(c, t));
    const auto rows = spoof_fidelity(datasets);
    write_file_atomic(c.output_dir / "spoof" / "jsd.csv", jsd_csv(rows));
    for (const auto& r : rows)
        log << "JSD " << device_name(r.device) << " legitimate vs spoofed: " << format_fixed(r.jsd_bits, 4) << " bits\n";

    const OriginPools pools = pool_by_origin(datasets);
    for (DeviceId d : {DeviceId::Device1, DeviceId::Device2}) {
        for (Legitimacy l : {Legitimacy::Legitimate, Legitimacy::Rogue}) {
            const std::string name = std::string("constellation_") + (l == Legitimacy::Legitimate ? "legit" : "rogue") +
                                     "_device" + (d == DeviceId::Device1 ? "1" : "2") + ".csv";
            write_file_atomic(c.output_dir / "spoof" / name, constellation_csv(pools.get(d, l), 100));
        }
    }
}

void cmd_attack_sweep(const ExperimentConfig& c, std::optional<Arch> arch, std::ostream& log) {
    c.validate();
    const LabeledDataset pool = load_task(c, Task::LegitVsRogue);
    std::vector<IqSample> legit_test;
    for (std::size_t i = pool.n_train; i < pool.size(); ++i)
        if (pool.origins[i].legitimacy == Legitimacy::Legitimate) legit_test.push_back(pool.samples[i]);

    SweepSettings settings;
    settings.psr_grid = c.psr_grid;
    settings.weights = c.weights;
    settings.reference_power = reference_power(legit_test);
    settings.clip = clip_bounds_of(pool.samples);

    std::string combined;
    const auto archs = archs_of(arch);
    for (Arch a : archs) {
        const Model c1 = load_model(c, Task::LegitVsRogue, a);
        const Model c2 = load_model(c, Task::DeviceIdMixed, a);
        settings.seed = attack_seed(c, a);
        ConstraintAudit audit;
        const auto rows = run_attack_sweep({&c1, &c2}, pool, a, settings, &audit);
        const std::string csv = sweep_csv(rows);
        write_file_atomic(c.output_dir / "attack" / ("sweep_" + arch_slug(a) + ".csv"), csv);
        combined += combined.empty() ? csv : csv.substr(csv.find('\n') + 1);
        for (TargetClassifier t : kAllTargets)
            write_file_atomic(c.output_dir / "attack" / (std::string(target_name(t)) + "_" + arch_slug(a) + ".svg"),
                              success_plot_svg(rows, t, a));
        const Json constraints{{"perturbations", audit.perturbations},
                               {"max_budget_excess", audit.max_budget_excess},
                               {"clip_violations", audit.clip_violations},
                               {"clip_low", settings.clip.low},
                               {"clip_high", settings.clip.high},
                               {"reference_power", settings.reference_power}};
        write_file_atomic(c.output_dir / "attack" / ("constraints_" + arch_slug(a) + ".json"), dump_json(constraints));
        log << "attack sweep " << arch_name(a) << ": " << rows.size() << " rows over " << pool.n_test()
            << " test samples\n";
    }
    if (archs.size() == kPipelineArchs.size()) write_file_atomic(c.output_dir / "attack" / "sweep.csv", combined);
}

void cmd_run_all(const ExperimentConfig& c, std::ostream& log) {
    c.validate();
    write_file_atomic(c.output_dir / "config.json", dump_json(to_json(c)));
    cmd_gen_data(c, log);
    cmd_train(c, std::nullopt, std::nullopt, log);
    cmd_spoof_report(c, log);
    cmd_attack_sweep(c, std::nullopt, log);
}

}  // namespace loraadv
