#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "har/reports.hpp"
#include "har/runner.hpp"

namespace {

int run_command(const std::string& config_path, std::optional<std::uint64_t> seed,
                std::optional<std::string> out_dir, std::optional<std::size_t> jobs) {
    har::ConfigDocument doc;
    try {
        doc = har::ConfigDocument::from_file(config_path);
        doc.apply_environment();
        if (seed) doc.set("run", "seed", std::to_string(*seed));
        if (out_dir) doc.set("run", "out", *out_dir);
        if (jobs) doc.set("run", "jobs", std::to_string(*jobs));
    } catch (const har::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return har::kExitConfigError;
    }

    har::ExperimentConfig config;
    try {
        config = har::parse_experiment_config(doc);
    } catch (const har::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return har::kExitConfigError;
    }

    try {
        const har::RunOutcome outcome = har::run_grid(config);
        std::cout << "wrote reports to " << outcome.out_dir.string() << "\n";
        for (const auto& cell : outcome.cells) {
            std::cout << har::method_name(cell.method) << " / " << har::precondition_mode_name(cell.mode)
                      << ": " << har::format_percent(cell.global_accuracy) << "% (pooled "
                      << har::format_percent(cell.pooled_accuracy) << "%)\n";
        }
        return har::kExitOk;
    } catch (const har::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return har::kExitConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return har::kExitDataError;
    }
}

int inspect_command(const std::string& path) {
    try {
        har::Warnings warnings;
        const har::Corpus corpus = har::load_any_corpus(path, har::default_scene_map(), &warnings);
        for (const auto& message : warnings.messages()) std::cerr << "warning: " << message << "\n";
        std::cout << har::describe_corpus(corpus);
        return har::kExitOk;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return har::kExitDataError;
    }
}

int synth_command(const std::string& out_dir, std::uint64_t seed, int subjects, int classes, int frames) {
    try {
        const har::Corpus corpus = har::generate_synthetic_corpus(seed, subjects, classes, frames);
        har::save_corpus_cache(corpus, out_dir);
        std::cout << "wrote " << corpus.recordings.size() << " recordings to " << out_dir << "\n";
        return har::kExitOk;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return har::kExitDataError;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"skeleton activity recognition experiment runner"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    std::optional<std::size_t> jobs;
    CLI::App* run = app.add_subcommand("run", "run the configured experiment grid");
    run->add_option("--config", config_path, "experiment config file")->required();
    run->add_option("--seed", seed, "override [run] seed");
    run->add_option("--out", out_dir, "override [run] out");
    run->add_option("--jobs", jobs, "override [run] jobs");

    std::string inspect_path;
    CLI::App* inspect = app.add_subcommand("inspect", "summarize a corpus directory");
    inspect->add_option("path", inspect_path, "corpus root or cache directory")->required();

    std::string synth_out;
    std::uint64_t synth_seed = 0;
    int synth_subjects = 4;
    int synth_classes = 3;
    int synth_frames = 60;
    CLI::App* synth = app.add_subcommand("synth", "write a synthetic corpus to disk");
    synth->add_option("--out", synth_out, "output directory")->required();
    synth->add_option("--seed", synth_seed, "generator seed")->required();
    synth->add_option("--subjects", synth_subjects, "subject count");
    synth->add_option("--classes", synth_classes, "class count");
    synth->add_option("--frames", synth_frames, "frames per recording");

    CLI11_PARSE(app, argc, argv);

    if (run->parsed()) return run_command(config_path, seed, out_dir, jobs);
    if (inspect->parsed()) return inspect_command(inspect_path);
    if (synth->parsed()) return synth_command(synth_out, synth_seed, synth_subjects, synth_classes, synth_frames);
    return har::kExitConfigError;
}
