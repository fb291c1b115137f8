#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "har/eval.hpp"

namespace har {

// Raw "[section]" / "key = value" document. Later assignments win, which is
// how environment and command-line overrides are layered on top.
class ConfigDocument {
public:
    static ConfigDocument from_file(const std::filesystem::path& path);
    static ConfigDocument from_string(const std::string& text, const std::string& origin = "<string>");

    void set(const std::string& section, const std::string& key, const std::string& value);
    std::optional<std::string> get(const std::string& section, const std::string& key) const;

    // Applies HAR_<SECTION>_<KEY>=value environment overrides.
    void apply_environment(const char* prefix = "HAR_");

    const std::map<std::string, std::string>& entries() const { return values_; }

private:
    std::map<std::string, std::string> values_;  // "section.key" -> value
};

struct SyntheticSpec {
    int subjects = 4;
    int classes = 3;
    int frames = 60;
};

struct ExperimentConfig {
    // corpus
    std::optional<std::filesystem::path> corpus_path;  // raw tree or cache dir
    std::optional<SyntheticSpec> synthetic;
    std::optional<std::filesystem::path> scene_map_path;

    // run
    std::vector<MethodKind> methods;
    std::vector<PreconditionMode> modes;
    ScenePolicy policy = ScenePolicy::per_scene;
    std::uint64_t seed = 0;  // mandatory, no default
    std::filesystem::path out_dir = "out";
    std::size_t jobs = 1;
    bool include_random_still = false;
    bool emit_svg = false;

    // per-method parameters
    KnnSpecOptions knn;
    std::vector<int> knn_sweep;  // optional extra k values to evaluate
    SvmSpecOptions svm;
    GwrParams gwr;
    GngParams gng;
    ClassifyAt classify_at = ClassifyAt::l1_pose;
    bool always_full_stack = false;

    MethodSpec method_spec(MethodKind kind) const;
};

// Validates and converts a raw document. Throws ConfigError with a
// diagnostic naming the offending key.
ExperimentConfig parse_experiment_config(const ConfigDocument& doc);

// The documented defaults, as a config file body.
std::string default_config_text();

}  // namespace har
