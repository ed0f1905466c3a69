// loraadv: dataset generation, training, spoofing reports and attack sweeps.

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "loraadv/harness.hpp"

using namespace loraadv;

namespace {

struct Options {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::string task;
    std::string arch;
};

ExperimentConfig resolve(const Options& o) {
    ExperimentConfig c = o.config.empty() ? ExperimentConfig{} : load_config(o.config);
    if (o.seed) c.seed = *o.seed;
    if (!o.out.empty()) c.output_dir = o.out;
    c.validate();
    return c;
}

std::optional<Task> task_of(const Options& o) {
    if (o.task.empty()) return std::nullopt;
    return parse_task(o.task);
}

std::optional<Arch> arch_of(const Options& o) {
    if (o.arch.empty()) return std::nullopt;
    return parse_arch(o.arch);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Synthetic LoRa fingerprinting, KDE spoofing and FGSM attack pipeline"};
    app.require_subcommand(1);
    Options o;
    app.add_option("--config", o.config, "experiment config (JSON)");
    app.add_option("--seed", o.seed, "override the config seed");
    app.add_option("--out", o.out, "override the output directory");

    auto* gen = app.add_subcommand("gen-data", "generate all four task datasets");
    auto* tr = app.add_subcommand("train", "train classifiers and write reports");
    auto* ev = app.add_subcommand("eval", "re-evaluate trained classifiers");
    auto* spoof = app.add_subcommand("spoof-report", "JSD and constellation exports");
    auto* sweep = app.add_subcommand("attack-sweep", "attack success versus PSR");
    auto* all = app.add_subcommand("run-all", "every stage in order");
    for (auto* sub : {tr, ev}) {
        sub->add_option("--task", o.task, "task name or slug (default: all)");
        sub->add_option("--arch", o.arch, "CNN or FNN (default: both)");
    }
    sweep->add_option("--arch", o.arch, "CNN or FNN (default: both)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }

    try {
        const ExperimentConfig c = resolve(o);
        if (gen->parsed()) cmd_gen_data(c, std::cout);
        else if (tr->parsed()) cmd_train(c, task_of(o), arch_of(o), std::cout);
        else if (ev->parsed()) cmd_eval(c, task_of(o), arch_of(o), std::cout);
        else if (spoof->parsed()) cmd_spoof_report(c, std::cout);
        else if (sweep->parsed()) cmd_attack_sweep(c, arch_of(o), std::cout);
        else if (all->parsed()) cmd_run_all(c, std::cout);
    } catch (const std::exception& e) {
        std::string msg = e.what();
        for (char& ch : msg)
            if (ch == '\n') ch = ' ';
        std::cerr << "error: " << msg << '\n';
        return 1;
    }
    return 0;
}
