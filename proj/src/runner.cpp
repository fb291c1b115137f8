#include "har/runner.hpp"

#include <chrono>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "har/reports.hpp"

namespace har {

using json = nlohmann::ordered_json;

Corpus corpus_from_config(const ExperimentConfig& config, Warnings* warnings) {
    if (config.synthetic) {
        return generate_synthetic_corpus(config.seed, config.synthetic->subjects, config.synthetic->classes,
                                         config.synthetic->frames);
    }
    const SceneMap scene_map =
        config.scene_map_path ? scene_map_from_csv(*config.scene_map_path) : default_scene_map();
    return load_any_corpus(*config.corpus_path, scene_map, warnings);
}

std::string describe_corpus(const Corpus& corpus) {
    std::ostringstream out;
    out << "recordings: " << corpus.recordings.size() << "\n";
    out << "frames: " << corpus.total_frames() << "\n";
    const auto subjects = corpus.subject_ids();
    out << "subjects (" << subjects.size() << "):";
    for (int s : subjects) out << " " << s;
    out << "\n";
    std::set<Scene> scenes;
    for (const auto& rec : corpus.recordings)
        for (Scene s : rec.scenes) scenes.insert(s);
    out << "scenes (" << scenes.size() << "):";
    for (Scene s : scenes) out << " " << scene_name(s);
    out << "\n";
    const auto labels = corpus.labels_present();
    out << "labels (" << labels.size() << "):\n";
    for (Activity label : labels) {
        std::size_t recordings = 0, frames = 0;
        for (const auto& rec : corpus.recordings) {
            if (rec.label != label) continue;
            ++recordings;
            frames += rec.frames.size();
        }
        out << "  " << activity_name(label) << ": " << recordings << " recording(s), " << frames
            << " frame(s)\n";
    }
    return out.str();
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path.string());
    out << content;
}

std::string cell_slug(MethodKind method, PreconditionMode mode) {
    return method_name(method) + "_" + precondition_mode_name(mode);
}

json config_echo_json(const ExperimentConfig& config) {
    json doc;
    if (config.synthetic) {
        doc["corpus"] = json{{"source", "synthetic"},
                             {"subjects", config.synthetic->subjects},
                             {"classes", config.synthetic->classes},
                             {"frames", config.synthetic->frames}};
    } else {
        doc["corpus"] = json{{"source", "path"}, {"path", config.corpus_path->string()}};
    }
    if (config.scene_map_path) doc["corpus"]["scene_map"] = config.scene_map_path->string();
    json methods = json::array();
    for (MethodKind m : config.methods) methods.push_back(method_name(m));
    json modes = json::array();
    for (PreconditionMode m : config.modes) modes.push_back(precondition_mode_name(m));
    doc["run"] = json{{"methods", std::move(methods)},
                      {"modes", std::move(modes)},
                      {"policy", scene_policy_name(config.policy)},
                      {"seed", config.seed},
                      {"out", config.out_dir.string()},
                      {"jobs", config.jobs},
                      {"include_random_still", config.include_random_still},
                      {"svg", config.emit_svg}};
    doc["knn"] = json{{"k", config.knn.k}};
    if (!config.knn_sweep.empty()) doc["knn"]["sweep"] = config.knn_sweep;
    doc["svm"] = json{{"lambda", config.svm.lambda_reg}, {"epochs", config.svm.epochs}};
    doc["gwr"] = gwr_params_to_json(config.gwr);
    doc["gng"] = gng_params_to_json(config.gng);
    doc["hierarchy"] = json{{"classify_at", classify_at_name(config.classify_at)},
                            {"full_stack", config.always_full_stack}};
    return doc;
}

}  // namespace

RunOutcome run_grid(const ExperimentConfig& config, Warnings* warnings) {
    const auto started = std::chrono::steady_clock::now();

    const Corpus corpus = corpus_from_config(config, warnings);
    SceneMap scene_map =
        config.scene_map_path ? scene_map_from_csv(*config.scene_map_path) : default_scene_map();

    ExperimentOptions options;
    options.include_random_still = config.include_random_still;
    options.jobs = config.jobs;
    options.scene_map = &scene_map;

    // Cells run sequentially; folds inside a cell fan out onto the worker
    // pool. Every fold seed is derived from (seed, method, mode), so cell
    // order cannot change any result.
    std::vector<AggregateReport> cells;
    for (MethodKind method : config.methods) {
        for (PreconditionMode mode : config.modes) {
            const std::uint64_t cell_seed =
                mix_seed(config.seed, static_cast<std::uint64_t>(method), static_cast<std::uint64_t>(mode));
            cells.push_back(run_loso_experiment(corpus, config.method_spec(method), mode, config.policy,
                                                cell_seed, options, warnings));
        }
    }

    // Optional KNN sweep: the same LOSO experiment at additional k values,
    // one CSV per mode.
    std::map<std::string, std::string> sweep_files;
    if (!config.knn_sweep.empty() &&
        std::find(config.methods.begin(), config.methods.end(), MethodKind::knn) != config.methods.end()) {
        for (PreconditionMode mode : config.modes) {
            std::ostringstream table;
            table << "k,global_accuracy_pct,pooled_accuracy_pct\n";
            for (int k : config.knn_sweep) {
                MethodSpec spec = config.method_spec(MethodKind::knn);
                spec.knn.k = k;
                const std::uint64_t sweep_seed = mix_seed(config.seed, static_cast<std::uint64_t>(mode),
                                                          static_cast<std::uint64_t>(k), 0x6b);
                const AggregateReport cell = run_loso_experiment(corpus, spec, mode, config.policy,
                                                                 sweep_seed, options, warnings);
                table << k << "," << format_percent(cell.global_accuracy) << ","
                      << format_percent(cell.pooled_accuracy) << "\n";
            }
            sweep_files["knn_sweep_" + precondition_mode_name(mode) + ".csv"] = table.str();
        }
    }

    namespace fs = std::filesystem;
    fs::create_directories(config.out_dir);
    write_file(config.out_dir / "grid.csv", render_grid_csv(cells));
    write_file(config.out_dir / "results.csv", render_results_csv(cells));
    write_file(config.out_dir / "report.json", render_report_json(cells));
    for (const AggregateReport& cell : cells) {
        const std::string slug = cell_slug(cell.method, cell.mode);
        write_file(config.out_dir / ("scenes_" + slug + ".csv"), render_scene_csv(cell));
        write_file(config.out_dir / ("confusion_" + slug + ".csv"), render_confusion_csv(cell.pooled));
        if (config.emit_svg)
            write_file(config.out_dir / ("confusion_" + slug + ".svg"), render_confusion_svg(cell.pooled));
    }
    for (const auto& [name, content] : sweep_files) write_file(config.out_dir / name, content);

    const auto elapsed =
        std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - started);
    json manifest;
    manifest["version"] = kProjectVersion;
    manifest["versions"] = json{{"json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                             std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                             std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
#if defined(__GNUC__) && !defined(__clang__)
                                {"compiler", "gcc " + std::to_string(__GNUC__) + "." +
                                                 std::to_string(__GNUC_MINOR__)}
#elif defined(__clang__)
                                {"compiler", "clang " + std::to_string(__clang_major__) + "." +
                                                 std::to_string(__clang_minor__)}
#else
                                {"compiler", "unknown"}
#endif
    };
    manifest["seed"] = config.seed;
    manifest["config"] = config_echo_json(config);
    manifest["corpus"] = json{{"recordings", corpus.recordings.size()},
                              {"frames", corpus.total_frames()},
                              {"subjects", corpus.subject_ids()}};
    manifest["wall_time_ms"] = elapsed.count();
    write_file(config.out_dir / "manifest.json", manifest.dump(2) + "\n");

    return RunOutcome{std::move(cells), config.out_dir};
}

}  // namespace har
