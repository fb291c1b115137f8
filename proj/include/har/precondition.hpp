#pragma once

#include <string>
#include <vector>

#include "har/common.hpp"
#include "har/dataset.hpp"

namespace har {

// The three preconditioning schemes compared in the experiment grid.
enum class PreconditionMode { none, centre_mirror, centre_mirror_normalize };

const std::string& precondition_mode_name(PreconditionMode mode);
std::optional<PreconditionMode> precondition_mode_from_name(std::string_view name);

enum class DataRole { train, test };

inline constexpr double kDegenerateDistance = 1e-6;  // mm, neck-torso rejection floor

// Subtracts the hip centre (midpoint of left and right hip) from every
// joint, so the output's hip centre sits at the origin.
SkeletonFrame centre_on_hips(const SkeletonFrame& frame);

// Negates x and swaps contralateral joint slots, producing the anatomically
// consistent mirror of a centred frame. Involution.
SkeletonFrame mirror_x(const SkeletonFrame& frame);

// Divides all coordinates by the neck-torso distance. Throws
// DegenerateSkeleton when that distance is below kDegenerateDistance.
SkeletonFrame normalize_neck_torso(const SkeletonFrame& frame);

// Joint-major flattening (j1x, j1y, j1z, ..., j15x, j15y, j15z).
Vec to_pose_vector(const SkeletonFrame& frame);

// One recording's worth of pose vectors with its provenance tags. Mirrored
// training copies keep the recording index of their source and set
// `mirrored`.
struct PreparedRecording {
    int recording_index = 0;  // index into the source corpus
    int subject_id = 0;
    Activity label = Activity::still;
    bool mirrored = false;
    std::vector<Vec> poses;
};

// Applies the selected mode to every recording. With centre_mirror (and
// centre_mirror_normalize) on training data the centred set is concatenated
// with its mirrored copy; test data is never mirrored. Degenerate frames
// under normalization are dropped with a warning.
std::vector<PreparedRecording> apply_preconditioning(const Corpus& corpus, PreconditionMode mode, DataRole role,
                                                     Warnings* warnings = nullptr);

std::size_t total_vectors(const std::vector<PreparedRecording>& prepared);

// First differences v(k) = p(k) - p(k-1); length N-1, empty for N < 2.
std::vector<Vec> compute_velocities(const std::vector<Vec>& poses);

// Stride-1 concatenation windows: element i = concat(v_i .. v_{i+w-1});
// output count max(0, N - w + 1). Callers window per recording, so windows
// never span recording boundaries.
std::vector<Vec> sliding_windows(const std::vector<Vec>& vectors, int window);

}  // namespace har
