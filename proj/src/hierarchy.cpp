#include "har/hierarchy.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <limits>

#include <json.hpp>

namespace har {

using json = nlohmann::json;

namespace {

const std::array<std::string, 2> kEngineNames = {"gwr", "gng"};
const std::array<std::string, 2> kClassifyAtNames = {"l1_pose", "l3_combined"};

}  // namespace

const std::string& gas_engine_name(GasEngine engine) {
    return kEngineNames[static_cast<int>(engine)];
}

std::optional<GasEngine> gas_engine_from_name(std::string_view name) {
    for (int i = 0; i < 2; ++i) {
        if (name == kEngineNames[i]) return static_cast<GasEngine>(i);
    }
    return std::nullopt;
}

const std::string& classify_at_name(ClassifyAt at) {
    return kClassifyAtNames[static_cast<int>(at)];
}

std::optional<ClassifyAt> classify_at_from_name(std::string_view name) {
    for (int i = 0; i < 2; ++i) {
        if (name == kClassifyAtNames[i]) return static_cast<ClassifyAt>(i);
    }
    return std::nullopt;
}

HierarchySpec HierarchySpec::defaults(GasEngine engine) {
    HierarchySpec spec;
    spec.l1.engine = engine;
    spec.l1.window = 1;
    spec.l2.engine = engine;
    spec.l2.window = 3;
    spec.l3.engine = engine;
    spec.l3.window = 3;
    return spec;
}

std::vector<Vec> remap_sequence(const GasGraph& graph, const std::vector<Vec>& vectors) {
    std::vector<Vec> out;
    out.reserve(vectors.size());
    for (const Vec& v : vectors) out.push_back(graph.node(quantize(graph, v).first).weight);
    return out;
}

std::map<int, Activity> label_prototypes(const GasGraph& graph, const std::vector<Vec>& vectors,
                                         const std::vector<Activity>& labels) {
    if (vectors.empty() || vectors.size() != labels.size())
        throw DataError("label_prototypes: empty or mismatched training data");
    std::map<int, Activity> out;
    for (const GasNode& node : graph.nodes()) {
        double best_d2 = std::numeric_limits<double>::infinity();
        std::size_t best_idx = 0;
        for (std::size_t i = 0; i < vectors.size(); ++i) {
            const double d2 = squared_distance_bounded(vectors[i], node.weight, best_d2);
            if (d2 < best_d2) {  // strict: earliest index wins ties
                best_d2 = d2;
                best_idx = i;
            }
        }
        out[node.id] = labels[best_idx];
    }
    return out;
}

namespace {

GasGraph train_layer(const LayerSpec& layer, const std::vector<Vec>& data, std::uint64_t seed) {
    if (layer.engine == GasEngine::gwr) return gwr_train(data, layer.gwr, seed);
    return gng_train(data, layer.gng, seed);
}

// The two branch sequences for one recording, aligned step-for-step: entry k
// holds the pose of frame k+1 and the velocity into frame k+1 (the first
// frame is dropped from the pose stream).
struct BranchInputs {
    std::vector<Vec> poses;       // N-1 vectors
    std::vector<Vec> velocities;  // N-1 vectors
};

BranchInputs branch_inputs(const std::vector<Vec>& poses) {
    BranchInputs out;
    out.velocities = compute_velocities(poses);
    out.poses.assign(poses.begin() + 1, poses.end());
    return out;
}

std::vector<Vec> layer3_inputs(const HierarchyModel& model, const BranchInputs& branch, int w2, int w3) {
    const std::vector<Vec> pose_windows = sliding_windows(remap_sequence(model.pose_l1, branch.poses), w2);
    const std::vector<Vec> vel_windows = sliding_windows(remap_sequence(*model.vel_l1, branch.velocities), w2);
    const std::vector<Vec> pose_protos = remap_sequence(*model.pose_l2, pose_windows);
    const std::vector<Vec> vel_protos = remap_sequence(*model.vel_l2, vel_windows);
    if (pose_protos.size() != vel_protos.size())
        throw Error("hierarchy: branch misalignment (" + std::to_string(pose_protos.size()) + " vs " +
                    std::to_string(vel_protos.size()) + ")");
    std::vector<Vec> combined;
    combined.reserve(pose_protos.size());
    for (std::size_t k = 0; k < pose_protos.size(); ++k) {
        Vec step;
        step.reserve(pose_protos[k].size() + vel_protos[k].size());
        step.insert(step.end(), pose_protos[k].begin(), pose_protos[k].end());
        step.insert(step.end(), vel_protos[k].begin(), vel_protos[k].end());
        combined.push_back(std::move(step));
    }
    return sliding_windows(combined, w3);
}

}  // namespace

HierarchyModel train_hierarchy(const std::vector<PreparedRecording>& train, const HierarchySpec& spec,
                               std::uint64_t seed, Warnings* warnings) {
    if (train.empty()) throw DataError("train_hierarchy: no training recordings");

    HierarchyModel model;
    model.spec = spec;

    std::vector<Vec> all_poses;
    std::vector<Activity> pose_labels;
    for (const PreparedRecording& rec : train) {
        for (const Vec& v : rec.poses) {
            all_poses.push_back(v);
            pose_labels.push_back(rec.label);
        }
    }
    model.pose_l1 = train_layer(spec.l1, all_poses, mix_seed(seed, 1));

    if (!spec.full_stack()) {
        model.prototype_labels = label_prototypes(model.pose_l1, all_poses, pose_labels);
        return model;
    }

    std::vector<Vec> all_velocities;
    std::vector<BranchInputs> branches(train.size());
    for (std::size_t r = 0; r < train.size(); ++r) {
        if (train[r].poses.size() < 2) continue;
        branches[r] = branch_inputs(train[r].poses);
        all_velocities.insert(all_velocities.end(), branches[r].velocities.begin(),
                              branches[r].velocities.end());
    }
    if (all_velocities.size() < 2) throw DataError("train_hierarchy: not enough frames for the velocity branch");
    model.vel_l1 = train_layer(spec.l1, all_velocities, mix_seed(seed, 2));

    const int w2 = spec.l2.window;
    const int w3 = spec.l3.window;

    std::vector<Vec> pose_window_data;
    std::vector<Vec> vel_window_data;
    std::size_t skipped_short = 0;
    for (std::size_t r = 0; r < train.size(); ++r) {
        if (train[r].poses.size() < static_cast<std::size_t>(kMinFramesForLayer3)) {
            ++skipped_short;
            continue;
        }
        const auto pw = sliding_windows(remap_sequence(model.pose_l1, branches[r].poses), w2);
        const auto vw = sliding_windows(remap_sequence(*model.vel_l1, branches[r].velocities), w2);
        pose_window_data.insert(pose_window_data.end(), pw.begin(), pw.end());
        vel_window_data.insert(vel_window_data.end(), vw.begin(), vw.end());
    }
    if (skipped_short > 0)
        warn(warnings, std::to_string(skipped_short) + " recording(s) below " +
                           std::to_string(kMinFramesForLayer3) + " frames only feed the first layer");
    if (pose_window_data.size() < 2)
        throw DataError("train_hierarchy: no recording is long enough for the upper layers");

    model.pose_l2 = train_layer(spec.l2, pose_window_data, mix_seed(seed, 3));
    model.vel_l2 = train_layer(spec.l2, vel_window_data, mix_seed(seed, 4));

    std::vector<Vec> l3_data;
    std::vector<Activity> l3_labels;
    for (std::size_t r = 0; r < train.size(); ++r) {
        if (train[r].poses.size() < static_cast<std::size_t>(kMinFramesForLayer3)) continue;
        const auto vectors = layer3_inputs(model, branches[r], w2, w3);
        for (const Vec& v : vectors) {
            l3_data.push_back(v);
            l3_labels.push_back(train[r].label);
        }
    }
    if (l3_data.size() < 2) throw DataError("train_hierarchy: no layer-3 training vectors");
    model.combined_l3 = train_layer(spec.l3, l3_data, mix_seed(seed, 5));

    if (spec.classify_at == ClassifyAt::l3_combined) {
        model.prototype_labels = label_prototypes(*model.combined_l3, l3_data, l3_labels);
    } else {
        model.prototype_labels = label_prototypes(model.pose_l1, all_poses, pose_labels);
    }
    return model;
}

namespace {

Activity majority_label(const std::vector<Activity>& steps) {
    std::array<int, kActivityCount> counts{};
    for (Activity a : steps) counts[static_cast<int>(a)]++;
    int best = 0;
    for (int c = 1; c < kActivityCount; ++c) {
        if (counts[c] > counts[best]) best = c;
    }
    return static_cast<Activity>(best);
}

}  // namespace

Classification classify(const HierarchyModel& model, const std::vector<Vec>& poses) {
    if (poses.empty()) throw DataError("classify: empty recording");
    Classification out;
    if (model.spec.classify_at == ClassifyAt::l1_pose) {
        out.per_step.reserve(poses.size());
        for (const Vec& v : poses) {
            const int node = quantize(model.pose_l1, v).first;
            out.per_step.push_back(model.prototype_labels.at(node));
        }
    } else {
        if (!model.vel_l1 || !model.pose_l2 || !model.vel_l2 || !model.combined_l3)
            throw Error("classify: model lacks the layers needed for combined classification");
        if (poses.size() < static_cast<std::size_t>(kMinFramesForLayer3))
            throw DataError("classify: recording of " + std::to_string(poses.size()) +
                            " frames is too short for layer 3 (needs " +
                            std::to_string(kMinFramesForLayer3) + ")");
        const BranchInputs branch = branch_inputs(poses);
        const auto vectors = layer3_inputs(model, branch, model.spec.l2.window, model.spec.l3.window);
        out.per_step.reserve(vectors.size());
        for (const Vec& v : vectors) {
            const int node = quantize(*model.combined_l3, v).first;
            out.per_step.push_back(model.prototype_labels.at(node));
        }
    }
    out.majority = majority_label(out.per_step);
    return out;
}

// --- serialization -----------------------------------------------------------------

namespace {

json layer_params_json(const LayerSpec& layer) {
    if (layer.engine == GasEngine::gwr) return gwr_params_to_json(layer.gwr);
    return gng_params_to_json(layer.gng);
}

json layer_spec_json(const LayerSpec& layer) {
    return json{{"engine", gas_engine_name(layer.engine)},
                {"window", layer.window},
                {"params", layer_params_json(layer)}};
}

LayerSpec layer_spec_from_json(const json& doc) {
    LayerSpec layer;
    const auto engine = gas_engine_from_name(doc.at("engine").get<std::string>());
    if (!engine) throw ParseError("model manifest: unknown engine");
    layer.engine = *engine;
    layer.window = doc.at("window").get<int>();
    if (layer.engine == GasEngine::gwr) layer.gwr = gwr_params_from_json(doc.at("params"));
    else layer.gng = gng_params_from_json(doc.at("params"));
    return layer;
}

void save_layer(const std::filesystem::path& dir, const std::string& name, const GasGraph& graph,
                const LayerSpec& layer) {
    std::ofstream out(dir / (name + ".json"));
    if (!out) throw DataError("cannot write model layer " + name);
    out << gas_to_json(graph, gas_engine_name(layer.engine), layer_params_json(layer)).dump(0) << "\n";
}

GasGraph load_layer(const std::filesystem::path& dir, const std::string& name) {
    std::ifstream in(dir / (name + ".json"));
    if (!in) throw DataError("cannot read model layer " + name);
    json doc;
    in >> doc;
    return gas_from_json(doc);
}

}  // namespace

void save_hierarchy(const HierarchyModel& model, const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    json manifest;
    manifest["classify_at"] = classify_at_name(model.spec.classify_at);
    manifest["always_full_stack"] = model.spec.always_full_stack;
    manifest["layers"] = json{{"l1", layer_spec_json(model.spec.l1)},
                              {"l2", layer_spec_json(model.spec.l2)},
                              {"l3", layer_spec_json(model.spec.l3)}};
    json labels = json::array();
    for (const auto& [node, label] : model.prototype_labels)
        labels.push_back(json{{"node", node}, {"label", activity_name(label)}});
    manifest["prototype_labels"] = std::move(labels);

    save_layer(dir, "pose_l1", model.pose_l1, model.spec.l1);
    json present = json::array();
    present.push_back("pose_l1");
    if (model.vel_l1) {
        save_layer(dir, "vel_l1", *model.vel_l1, model.spec.l1);
        present.push_back("vel_l1");
    }
    if (model.pose_l2) {
        save_layer(dir, "pose_l2", *model.pose_l2, model.spec.l2);
        present.push_back("pose_l2");
    }
    if (model.vel_l2) {
        save_layer(dir, "vel_l2", *model.vel_l2, model.spec.l2);
        present.push_back("vel_l2");
    }
    if (model.combined_l3) {
        save_layer(dir, "combined_l3", *model.combined_l3, model.spec.l3);
        present.push_back("combined_l3");
    }
    manifest["layers_present"] = std::move(present);

    std::ofstream out(dir / "manifest.json");
    if (!out) throw DataError("cannot write model manifest");
    out << manifest.dump(2) << "\n";
}

HierarchyModel load_hierarchy(const std::filesystem::path& dir) {
    std::ifstream in(dir / "manifest.json");
    if (!in) throw DataError("cannot read model manifest in " + dir.string());
    json manifest;
    in >> manifest;

    HierarchyModel model;
    const auto at = classify_at_from_name(manifest.at("classify_at").get<std::string>());
    if (!at) throw ParseError("model manifest: unknown classify_at");
    model.spec.classify_at = *at;
    model.spec.always_full_stack = manifest.at("always_full_stack").get<bool>();
    model.spec.l1 = layer_spec_from_json(manifest.at("layers").at("l1"));
    model.spec.l2 = layer_spec_from_json(manifest.at("layers").at("l2"));
    model.spec.l3 = layer_spec_from_json(manifest.at("layers").at("l3"));
    for (const auto& entry : manifest.at("prototype_labels")) {
        const auto label = activity_from_name(entry.at("label").get<std::string>());
        if (!label) throw ParseError("model manifest: unknown label");
        model.prototype_labels[entry.at("node").get<int>()] = *label;
    }

    std::vector<std::string> present = manifest.at("layers_present").get<std::vector<std::string>>();
    auto has = [&](const char* name) {
        return std::find(present.begin(), present.end(), name) != present.end();
    };
    model.pose_l1 = load_layer(dir, "pose_l1");
    if (has("vel_l1")) model.vel_l1 = load_layer(dir, "vel_l1");
    if (has("pose_l2")) model.pose_l2 = load_layer(dir, "pose_l2");
    if (has("vel_l2")) model.vel_l2 = load_layer(dir, "vel_l2");
    if (has("combined_l3")) model.combined_l3 = load_layer(dir, "combined_l3");
    return model;
}

}  // namespace har
