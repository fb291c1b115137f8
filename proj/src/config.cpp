#include "har/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

extern char** environ;

namespace har {

namespace {

std::string trimmed(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

std::string lowered(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

}  // namespace

ConfigDocument ConfigDocument::from_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file: " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    return from_string(buffer.str(), path.string());
}

ConfigDocument ConfigDocument::from_string(const std::string& text, const std::string& origin) {
    ConfigDocument doc;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string stripped = trimmed(line);
        if (stripped.empty() || stripped[0] == '#' || stripped[0] == ';') continue;
        if (stripped.front() == '[') {
            if (stripped.back() != ']')
                throw ConfigError(origin + ":" + std::to_string(lineno) + ": unterminated section header");
            section = lowered(trimmed(stripped.substr(1, stripped.size() - 2)));
            if (section.empty())
                throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty section name");
            continue;
        }
        const auto eq = stripped.find('=');
        if (eq == std::string::npos)
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected 'key = value'");
        const std::string key = lowered(trimmed(stripped.substr(0, eq)));
        std::string value = trimmed(stripped.substr(eq + 1));
        // inline comments: value text after whitespace + '#'
        for (std::size_t i = 0; i < value.size(); ++i) {
            if (value[i] == '#' && (i == 0 || std::isspace(static_cast<unsigned char>(value[i - 1])))) {
                value = trimmed(value.substr(0, i));
                break;
            }
        }
        if (key.empty()) throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key");
        if (section.empty())
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": key outside any [section]");
        doc.set(section, key, value);
    }
    return doc;
}

void ConfigDocument::set(const std::string& section, const std::string& key, const std::string& value) {
    values_[lowered(section) + "." + lowered(key)] = value;
}

std::optional<std::string> ConfigDocument::get(const std::string& section, const std::string& key) const {
    const auto it = values_.find(lowered(section) + "." + lowered(key));
    if (it == values_.end()) return std::nullopt;
    return it->second;
}

void ConfigDocument::apply_environment(const char* prefix) {
    const std::string pre(prefix);
    for (char** env = environ; env && *env; ++env) {
        const std::string entry(*env);
        if (entry.rfind(pre, 0) != 0) continue;
        const auto eq = entry.find('=');
        if (eq == std::string::npos) continue;
        const std::string name = entry.substr(pre.size(), eq - pre.size());
        const auto sep = name.find('_');
        if (sep == std::string::npos || sep == 0 || sep + 1 >= name.size()) continue;
        set(lowered(name.substr(0, sep)), lowered(name.substr(sep + 1)), entry.substr(eq + 1));
    }
}

// --- typed parsing -----------------------------------------------------------------

namespace {

class ConfigReader {
public:
    explicit ConfigReader(const ConfigDocument& doc) : doc_(doc) {}

    std::optional<std::string> raw(const std::string& section, const std::string& key) const {
        return doc_.get(section, key);
    }

    std::string get_string(const std::string& section, const std::string& key,
                           const std::string& fallback) const {
        return raw(section, key).value_or(fallback);
    }

    double get_double(const std::string& section, const std::string& key, double fallback) const {
        const auto v = raw(section, key);
        if (!v) return fallback;
        try {
            std::size_t pos = 0;
            const double d = std::stod(*v, &pos);
            if (pos != v->size()) throw std::invalid_argument("trailing characters");
            return d;
        } catch (const std::exception&) {
            throw ConfigError("[" + section + "] " + key + ": not a number: '" + *v + "'");
        }
    }

    long get_long(const std::string& section, const std::string& key, long fallback) const {
        const auto v = raw(section, key);
        if (!v) return fallback;
        try {
            std::size_t pos = 0;
            const long n = std::stol(*v, &pos);
            if (pos != v->size()) throw std::invalid_argument("trailing characters");
            return n;
        } catch (const std::exception&) {
            throw ConfigError("[" + section + "] " + key + ": not an integer: '" + *v + "'");
        }
    }

    bool get_bool(const std::string& section, const std::string& key, bool fallback) const {
        const auto v = raw(section, key);
        if (!v) return fallback;
        const std::string s = lowered(*v);
        if (s == "true" || s == "yes" || s == "1" || s == "on") return true;
        if (s == "false" || s == "no" || s == "0" || s == "off") return false;
        throw ConfigError("[" + section + "] " + key + ": not a boolean: '" + *v + "'");
    }

private:
    const ConfigDocument& doc_;
};

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> out;
    std::string token;
    std::stringstream ss(value);
    while (std::getline(ss, token, ',')) {
        const std::string t = trimmed(token);
        if (!t.empty()) out.push_back(t);
    }
    return out;
}

}  // namespace

MethodSpec ExperimentConfig::method_spec(MethodKind kind) const {
    MethodSpec spec = MethodSpec::make(kind);
    spec.knn = knn;
    spec.svm = svm;
    if (kind == MethodKind::gwr || kind == MethodKind::gng) {
        const GasEngine engine = kind == MethodKind::gwr ? GasEngine::gwr : GasEngine::gng;
        spec.hierarchy = HierarchySpec::defaults(engine);
        spec.hierarchy.classify_at = classify_at;
        spec.hierarchy.always_full_stack = always_full_stack;
        for (LayerSpec* layer : {&spec.hierarchy.l1, &spec.hierarchy.l2, &spec.hierarchy.l3}) {
            layer->gwr = gwr;
            layer->gng = gng;
        }
    }
    return spec;
}

ExperimentConfig parse_experiment_config(const ConfigDocument& doc) {
    ConfigReader reader(doc);
    ExperimentConfig config;

    const std::string source = lowered(reader.get_string("corpus", "source", ""));
    if (source == "synthetic") {
        SyntheticSpec synth;
        synth.subjects = static_cast<int>(reader.get_long("corpus", "subjects", synth.subjects));
        synth.classes = static_cast<int>(reader.get_long("corpus", "classes", synth.classes));
        synth.frames = static_cast<int>(reader.get_long("corpus", "frames", synth.frames));
        config.synthetic = synth;
    } else if (source == "path") {
        const auto path = reader.raw("corpus", "path");
        if (!path || path->empty()) throw ConfigError("[corpus] path is required when source = path");
        config.corpus_path = *path;
    } else if (source.empty()) {
        throw ConfigError("[corpus] source is required ('synthetic' or 'path')");
    } else {
        throw ConfigError("[corpus] source: expected 'synthetic' or 'path', got '" + source + "'");
    }
    if (const auto map_path = reader.raw("corpus", "scene_map"); map_path && !map_path->empty())
        config.scene_map_path = *map_path;

    for (const std::string& name : split_list(reader.get_string("run", "methods", "knn"))) {
        const auto kind = method_from_name(lowered(name));
        if (!kind) throw ConfigError("[run] methods: unknown method '" + name + "'");
        config.methods.push_back(*kind);
    }
    if (config.methods.empty()) throw ConfigError("[run] methods: need at least one method");

    for (const std::string& name : split_list(reader.get_string("run", "modes", "centre_mirror"))) {
        const auto mode = precondition_mode_from_name(lowered(name));
        if (!mode) throw ConfigError("[run] modes: unknown preconditioning mode '" + name + "'");
        config.modes.push_back(*mode);
    }
    if (config.modes.empty()) throw ConfigError("[run] modes: need at least one mode");

    const auto policy = scene_policy_from_name(lowered(reader.get_string("run", "policy", "per_scene")));
    if (!policy) throw ConfigError("[run] policy: expected per_scene or all_actions");
    config.policy = *policy;

    const auto seed = reader.raw("run", "seed");
    if (!seed) throw ConfigError("[run] seed is required (runs must be reproducible)");
    try {
        config.seed = std::stoull(*seed);
    } catch (const std::exception&) {
        throw ConfigError("[run] seed: not an unsigned integer: '" + *seed + "'");
    }

    config.out_dir = reader.get_string("run", "out", "out");
    const long jobs = reader.get_long("run", "jobs", 1);
    if (jobs < 1) throw ConfigError("[run] jobs must be >= 1");
    config.jobs = static_cast<std::size_t>(jobs);
    config.include_random_still = reader.get_bool("run", "include_random_still", false);
    config.emit_svg = reader.get_bool("run", "svg", false);

    config.knn.k = static_cast<int>(reader.get_long("knn", "k", 1));
    if (config.knn.k < 1) throw ConfigError("[knn] k must be >= 1");
    if (const auto sweep = reader.raw("knn", "sweep"); sweep && !sweep->empty()) {
        for (const std::string& token : split_list(*sweep)) {
            try {
                const int k = std::stoi(token);
                if (k < 1) throw std::invalid_argument("non-positive");
                config.knn_sweep.push_back(k);
            } catch (const std::exception&) {
                throw ConfigError("[knn] sweep: bad k value '" + token + "'");
            }
        }
    }

    config.svm.lambda_reg = reader.get_double("svm", "lambda", 1e-4);
    config.svm.epochs = static_cast<int>(reader.get_long("svm", "epochs", 20));

    GwrParams& gwr = config.gwr;
    gwr.activation_threshold = reader.get_double("gwr", "activation_threshold", gwr.activation_threshold);
    gwr.max_nodes = static_cast<std::size_t>(reader.get_long("gwr", "max_nodes", static_cast<long>(gwr.max_nodes)));
    gwr.epochs = static_cast<int>(reader.get_long("gwr", "epochs", gwr.epochs));
    gwr.eps_b = reader.get_double("gwr", "eps_b", gwr.eps_b);
    gwr.eps_n = reader.get_double("gwr", "eps_n", gwr.eps_n);
    gwr.max_edge_age = static_cast<int>(reader.get_long("gwr", "max_edge_age", gwr.max_edge_age));
    gwr.h0 = reader.get_double("gwr", "h0", gwr.h0);
    gwr.alpha_b = reader.get_double("gwr", "alpha_b", gwr.alpha_b);
    gwr.alpha_n = reader.get_double("gwr", "alpha_n", gwr.alpha_n);
    gwr.tau_b = reader.get_double("gwr", "tau_b", gwr.tau_b);
    gwr.tau_n = reader.get_double("gwr", "tau_n", gwr.tau_n);
    gwr.firing_threshold = reader.get_double("gwr", "firing_threshold", gwr.firing_threshold);
    gwr.outlier_gamma = reader.get_double("gwr", "gamma", gwr.outlier_gamma);
    gwr.outlier_gating = reader.get_bool("gwr", "gating", gwr.outlier_gating);
    gwr.gate_warmup = reader.get_long("gwr", "gate_warmup", gwr.gate_warmup);

    GngParams& gng = config.gng;
    gng.insertion_interval = reader.get_long("gng", "insertion_interval", gng.insertion_interval);
    gng.eps_b = reader.get_double("gng", "eps_b", gng.eps_b);
    gng.eps_n = reader.get_double("gng", "eps_n", gng.eps_n);
    gng.max_edge_age = static_cast<int>(reader.get_long("gng", "max_edge_age", gng.max_edge_age));
    gng.error_decay = reader.get_double("gng", "error_decay", gng.error_decay);
    gng.split_error_scale = reader.get_double("gng", "split_error_scale", gng.split_error_scale);
    gng.max_nodes = static_cast<std::size_t>(reader.get_long("gng", "max_nodes", static_cast<long>(gng.max_nodes)));
    gng.epochs = static_cast<int>(reader.get_long("gng", "epochs", gng.epochs));

    const auto at = classify_at_from_name(lowered(reader.get_string("hierarchy", "classify_at", "l1_pose")));
    if (!at) throw ConfigError("[hierarchy] classify_at: expected l1_pose or l3_combined");
    config.classify_at = *at;
    config.always_full_stack = reader.get_bool("hierarchy", "full_stack", false);

    try {
        config.gwr.validate();
        config.gng.validate();
    } catch (const ConfigError& e) {
        throw ConfigError(std::string("invalid gas parameters: ") + e.what());
    }
    return config;
}

std::string default_config_text() {
    return R"([corpus]
# source = synthetic | path
source = synthetic
# path = /data/cad60            # used when source = path
# scene_map =                   # optional scene,activity CSV override
subjects = 4                    # synthetic corpus shape
classes = 3
frames = 60

[run]
methods = knn                   # comma list of svm,knn,gng,gwr
modes = centre_mirror           # comma list of none,centre_mirror,centre_mirror_normalize
policy = per_scene              # per_scene | all_actions
# seed =                        # required, no default
out = out
jobs = 1
include_random_still = false
svg = false

[knn]
k = 1
# sweep =                       # optional comma list of extra k values

[svm]
lambda = 1e-4
epochs = 20

[gwr]
activation_threshold = 0.995
max_nodes = 1000
epochs = 10
eps_b = 0.2
eps_n = 0.006
max_edge_age = 50
h0 = 1.0
alpha_b = 0.95
alpha_n = 0.95
tau_b = 3.33
tau_n = 14.3
firing_threshold = 0.1
gamma = 4
gating = true
gate_warmup = 100

[gng]
insertion_interval = 3
eps_b = 0.2
eps_n = 0.006
max_edge_age = 1
error_decay = 0.995
split_error_scale = 0.5
max_nodes = 1000
epochs = 10

[hierarchy]
classify_at = l1_pose           # l1_pose | l3_combined
full_stack = false
)";
}

}  // namespace har
