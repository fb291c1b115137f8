#include "har/precondition.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace har {

namespace {

const std::array<std::string, 3> kModeNames = {"none", "centre_mirror", "centre_mirror_normalize"};

constexpr std::array<std::pair<JointId, JointId>, 6> kMirrorPairs = {{
    {JointId::left_shoulder, JointId::right_shoulder},
    {JointId::left_elbow, JointId::right_elbow},
    {JointId::left_hip, JointId::right_hip},
    {JointId::left_knee, JointId::right_knee},
    {JointId::left_hand, JointId::right_hand},
    {JointId::left_foot, JointId::right_foot},
}};

}  // namespace

const std::string& precondition_mode_name(PreconditionMode mode) {
    return kModeNames[static_cast<int>(mode)];
}

std::optional<PreconditionMode> precondition_mode_from_name(std::string_view name) {
    for (int i = 0; i < 3; ++i) {
        if (name == kModeNames[i]) return static_cast<PreconditionMode>(i);
    }
    return std::nullopt;
}

SkeletonFrame centre_on_hips(const SkeletonFrame& frame) {
    const Joint& lh = frame.joint(JointId::left_hip);
    const Joint& rh = frame.joint(JointId::right_hip);
    const double cx = 0.5 * (lh.x + rh.x);
    const double cy = 0.5 * (lh.y + rh.y);
    const double cz = 0.5 * (lh.z + rh.z);
    SkeletonFrame out = frame;
    for (Joint& j : out.joints) {
        j.x -= cx;
        j.y -= cy;
        j.z -= cz;
    }
    return out;
}

SkeletonFrame mirror_x(const SkeletonFrame& frame) {
    SkeletonFrame out = frame;
    for (Joint& j : out.joints) j.x = -j.x;
    for (const auto& [left, right] : kMirrorPairs)
        std::swap(out.joint(left), out.joint(right));
    return out;
}

SkeletonFrame normalize_neck_torso(const SkeletonFrame& frame) {
    const Joint& neck = frame.joint(JointId::neck);
    const Joint& torso = frame.joint(JointId::torso);
    const double dx = neck.x - torso.x;
    const double dy = neck.y - torso.y;
    const double dz = neck.z - torso.z;
    const double dist = std::sqrt(dx * dx + dy * dy + dz * dz);
    if (dist < kDegenerateDistance)
        throw DegenerateSkeleton("neck-torso distance " + std::to_string(dist) + " below " +
                                 std::to_string(kDegenerateDistance));
    SkeletonFrame out = frame;
    const double inv = 1.0 / dist;
    for (Joint& j : out.joints) {
        j.x *= inv;
        j.y *= inv;
        j.z *= inv;
    }
    return out;
}

Vec to_pose_vector(const SkeletonFrame& frame) {
    Vec v;
    v.reserve(kPoseDim);
    for (const Joint& j : frame.joints) {
        v.push_back(j.x);
        v.push_back(j.y);
        v.push_back(j.z);
    }
    return v;
}

std::vector<PreparedRecording> apply_preconditioning(const Corpus& corpus, PreconditionMode mode, DataRole role,
                                                     Warnings* warnings) {
    const bool centre = mode != PreconditionMode::none;
    const bool normalize = mode == PreconditionMode::centre_mirror_normalize;
    const bool mirror = centre && role == DataRole::train;

    std::vector<PreparedRecording> out;
    std::vector<std::vector<SkeletonFrame>> kept_frames;  // per recording, post centre/normalize
    for (std::size_t r = 0; r < corpus.recordings.size(); ++r) {
        const ActionRecording& rec = corpus.recordings[r];
        PreparedRecording prepared;
        prepared.recording_index = static_cast<int>(r);
        prepared.subject_id = rec.subject_id;
        prepared.label = rec.label;
        std::vector<SkeletonFrame> frames;
        frames.reserve(rec.frames.size());
        for (const SkeletonFrame& raw : rec.frames) {
            SkeletonFrame frame = centre ? centre_on_hips(raw) : raw;
            if (normalize) {
                try {
                    frame = normalize_neck_torso(frame);
                } catch (const DegenerateSkeleton& e) {
                    warn(warnings, "recording " + rec.source_id + " frame " +
                                       std::to_string(raw.frame_index) + " dropped: " + e.what());
                    continue;
                }
            }
            prepared.poses.push_back(to_pose_vector(frame));
            frames.push_back(frame);
        }
        if (prepared.poses.empty()) {
            warn(warnings, "recording " + rec.source_id + " has no usable frames after preconditioning");
            continue;
        }
        out.push_back(std::move(prepared));
        if (mirror) kept_frames.push_back(std::move(frames));
    }

    if (mirror) {
        // Mirrored copies are appended after all originals, so the training
        // set is the centred set concatenated with its mirror image.
        const std::size_t originals = out.size();
        for (std::size_t i = 0; i < originals; ++i) {
            PreparedRecording mirrored;
            mirrored.recording_index = out[i].recording_index;
            mirrored.subject_id = out[i].subject_id;
            mirrored.label = out[i].label;
            mirrored.mirrored = true;
            mirrored.poses.reserve(kept_frames[i].size());
            for (const SkeletonFrame& frame : kept_frames[i])
                mirrored.poses.push_back(to_pose_vector(mirror_x(frame)));
            out.push_back(std::move(mirrored));
        }
    }
    return out;
}

std::size_t total_vectors(const std::vector<PreparedRecording>& prepared) {
    std::size_t n = 0;
    for (const auto& p : prepared) n += p.poses.size();
    return n;
}

std::vector<Vec> compute_velocities(const std::vector<Vec>& poses) {
    std::vector<Vec> velocities;
    if (poses.size() < 2) return velocities;
    velocities.reserve(poses.size() - 1);
    for (std::size_t k = 1; k < poses.size(); ++k) {
        if (poses[k].size() != poses[k - 1].size())
            throw DimensionMismatch("compute_velocities: inconsistent pose dimensions");
        Vec v(poses[k].size());
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = poses[k][i] - poses[k - 1][i];
        velocities.push_back(std::move(v));
    }
    return velocities;
}

std::vector<Vec> sliding_windows(const std::vector<Vec>& vectors, int window) {
    if (window < 1) throw Error("sliding_windows: window must be >= 1");
    std::vector<Vec> out;
    const std::size_t w = static_cast<std::size_t>(window);
    if (vectors.size() < w) return out;
    const std::size_t dim = vectors.empty() ? 0 : vectors[0].size();
    out.reserve(vectors.size() - w + 1);
    for (std::size_t start = 0; start + w <= vectors.size(); ++start) {
        Vec concat;
        concat.reserve(w * dim);
        for (std::size_t k = 0; k < w; ++k) {
            const Vec& v = vectors[start + k];
            if (v.size() != dim) throw DimensionMismatch("sliding_windows: inconsistent vector dimensions");
            concat.insert(concat.end(), v.begin(), v.end());
        }
        out.push_back(std::move(concat));
    }
    return out;
}

}  // namespace har
