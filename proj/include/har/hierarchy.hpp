#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <vector>

#include "har/gas.hpp"
#include "har/precondition.hpp"

namespace har {

enum class GasEngine { gwr, gng };

const std::string& gas_engine_name(GasEngine engine);
std::optional<GasEngine> gas_engine_from_name(std::string_view name);

enum class ClassifyAt { l1_pose, l3_combined };

const std::string& classify_at_name(ClassifyAt at);
std::optional<ClassifyAt> classify_at_from_name(std::string_view name);

struct LayerSpec {
    GasEngine engine = GasEngine::gwr;
    GwrParams gwr;
    GngParams gng;
    int window = 1;  // 1 for layer 1, 3 for layers 2 and 3
};

struct HierarchySpec {
    LayerSpec l1;
    LayerSpec l2;
    LayerSpec l3;
    ClassifyAt classify_at = ClassifyAt::l1_pose;
    // The upper layers are trained when classifying at layer 3; with layer-1
    // classification they are skipped unless this forces them.
    bool always_full_stack = false;

    static HierarchySpec defaults(GasEngine engine);
    bool full_stack() const { return always_full_stack || classify_at == ClassifyAt::l3_combined; }
};

// Recordings shorter than this do not contribute to (and cannot be
// classified by) the combined third layer.
inline constexpr int kMinFramesForLayer3 = 8;

// Nominal receptive field of one layer-3 vector: 3 layer-2 slots of 3
// layer-1 slots each.
inline constexpr int kLayer3ReceptiveFieldFrames = 9;

// Two branches (poses, velocities) of two gas layers each, plus a combined
// third layer; prototypes of the classifying layer carry activity labels.
struct HierarchyModel {
    HierarchySpec spec;
    GasGraph pose_l1{kPoseDim};
    std::optional<GasGraph> vel_l1;
    std::optional<GasGraph> pose_l2;
    std::optional<GasGraph> vel_l2;
    std::optional<GasGraph> combined_l3;
    std::map<int, Activity> prototype_labels;  // classifying layer's nodes
};

// Element-wise replacement of each vector by its nearest prototype weight.
std::vector<Vec> remap_sequence(const GasGraph& graph, const std::vector<Vec>& vectors);

// 1-NN labelling of prototypes from labelled training vectors; ties prefer
// the earliest training index.
std::map<int, Activity> label_prototypes(const GasGraph& graph, const std::vector<Vec>& vectors,
                                         const std::vector<Activity>& labels);

HierarchyModel train_hierarchy(const std::vector<PreparedRecording>& train, const HierarchySpec& spec,
                               std::uint64_t seed, Warnings* warnings = nullptr);

struct Classification {
    std::vector<Activity> per_step;
    Activity majority = Activity::still;
};

// Per-step labels for one recording's preconditioned pose vectors, plus the
// majority vote (ties resolve to the earliest label in canonical order).
// Layer-3 classification requires at least kMinFramesForLayer3 frames.
Classification classify(const HierarchyModel& model, const std::vector<Vec>& poses);

// Model directory layout: per-layer gas JSON files plus manifest.json.
void save_hierarchy(const HierarchyModel& model, const std::filesystem::path& dir);
HierarchyModel load_hierarchy(const std::filesystem::path& dir);

}  // namespace har
