#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "har/common.hpp"

namespace har {

inline constexpr int kJointCount = 15;
inline constexpr int kPoseDim = 3 * kJointCount;
inline constexpr double kFrameRate = 30.0;

// CAD-60 serial joint order: the first 11 joints carry orientation data in
// the raw files, the last 4 are position-only.
enum class JointId : int {
    head = 0,
    neck,
    torso,
    left_shoulder,
    left_elbow,
    right_shoulder,
    right_elbow,
    left_hip,
    left_knee,
    right_hip,
    right_knee,
    left_hand,
    right_hand,
    left_foot,
    right_foot,
};

struct Joint {
    double x = 0.0;  // millimetres
    double y = 0.0;
    double z = 0.0;
    double confidence = 1.0;  // in [0,1]
};

struct SkeletonFrame {
    int frame_index = 0;  // >= 1, strictly increasing within a recording
    std::array<Joint, kJointCount> joints{};

    const Joint& joint(JointId id) const { return joints[static_cast<int>(id)]; }
    Joint& joint(JointId id) { return joints[static_cast<int>(id)]; }
};

// Closed set of 14 activities; the enum order is the canonical order used
// for confusion-matrix axes and tie-breaking.
enum class Activity : int {
    brushing_teeth = 0,
    cooking_chopping,
    cooking_stirring,
    drinking_water,
    opening_pill_container,
    random_movements,
    relaxing_on_couch,
    rinsing_mouth_with_water,
    still,
    talking_on_couch,
    talking_on_the_phone,
    wearing_contact_lenses,
    working_on_computer,
    writing_on_whiteboard,
};

inline constexpr int kActivityCount = 14;

const std::string& activity_name(Activity a);
// Accepts both canonical display names and the underscore-separated names
// used by the CAD-60 label index files.
std::optional<Activity> activity_from_name(std::string_view name);
std::vector<Activity> all_activities();

enum class Scene : int {
    bathroom = 0,
    bedroom,
    kitchen,
    livingroom,
    office,
};

inline constexpr int kSceneCount = 5;

const std::string& scene_name(Scene s);
std::optional<Scene> scene_from_name(std::string_view name);
std::vector<Scene> all_scenes();

struct ActionRecording {
    int subject_id = 0;           // 1..4 for CAD-60
    std::vector<Scene> scenes;    // every scene this activity is assigned to
    Activity label = Activity::still;
    std::vector<SkeletonFrame> frames;
    double frame_rate = kFrameRate;
    std::string source_id;  // raw file id or synthetic tag
};

enum class Provenance { cad60_raw, synthetic };

struct Corpus {
    std::vector<ActionRecording> recordings;
    Provenance provenance = Provenance::synthetic;

    std::vector<int> subject_ids() const;           // sorted, unique
    std::vector<Activity> labels_present() const;   // canonical order
    std::size_t total_frames() const;
};

// Compares subjects, scenes, labels, frame rates and joint positions.
// Confidence values are not part of the cached representation and are
// ignored here.
bool corpus_equal(const Corpus& a, const Corpus& b);

struct LosoSplit {
    int held_out_subject = 0;
    Corpus train;
    Corpus test;
};

// Target activities per scene. 'random' and 'still' are handled separately:
// they belong to every scene and are included only on request.
using SceneMap = std::map<Scene, std::vector<Activity>>;

const SceneMap& default_scene_map();
SceneMap scene_map_from_csv(const std::filesystem::path& file);
void write_scene_map_csv(const SceneMap& map, const std::filesystem::path& file);

bool is_scene_wildcard(Activity a);  // true for random/still

// --- parsing ---------------------------------------------------------------

// One CAD-60 skeleton file: one frame per comma-separated line
// (frame id, 11 joints as 9 orientation + 1 conf + 3 position + 1 conf,
// then 4 joints as 3 position + 1 conf), terminated by an "END" line.
// Orientations are discarded. Positions are kept verbatim, in millimetres.
std::vector<SkeletonFrame> parse_cad60_skeleton_file(std::istream& in, Warnings* warnings = nullptr);

// Loads a raw CAD-60 tree: per-subject folders, each holding an
// activityLabel.txt index ("id,label" lines) and one <id>.txt per recording.
Corpus load_corpus(const std::filesystem::path& root, const SceneMap& scene_map = default_scene_map(),
                   Warnings* warnings = nullptr);

// --- synthetic corpora -------------------------------------------------------

// Deterministic desk-scale corpus: each class is a distinct smooth
// joint-trajectory template, each subject applies a fixed body scale, a
// fixed placement offset and additive noise.
Corpus generate_synthetic_corpus(std::uint64_t seed, int subjects, int classes, int frames_per_recording);

// --- splits ------------------------------------------------------------------

LosoSplit split_loso(const Corpus& corpus, int held_out_subject);
Corpus scene_subset(const Corpus& corpus, Scene scene, bool include_random_still = false);

// --- corpus cache -------------------------------------------------------------

// One JSON document per recording: {subject, scenes, label, frame_rate,
// frames: [[45 numbers]...]} with positions in millimetres.
void save_corpus_cache(const Corpus& corpus, const std::filesystem::path& dir);
Corpus load_corpus_cache(const std::filesystem::path& dir);
bool looks_like_corpus_cache(const std::filesystem::path& dir);

// Cache directory if it holds recording JSON documents, raw CAD-60 tree
// otherwise.
Corpus load_any_corpus(const std::filesystem::path& path, const SceneMap& scene_map = default_scene_map(),
                       Warnings* warnings = nullptr);

}  // namespace har
