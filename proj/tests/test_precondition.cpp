#include <doctest.h>

#include <cmath>
#include <set>

#include "har/precondition.hpp"
#include "test_support.hpp"

using namespace har;

namespace {

Joint hip_centre(const SkeletonFrame& frame) {
    const Joint& lh = frame.joint(JointId::left_hip);
    const Joint& rh = frame.joint(JointId::right_hip);
    return Joint{0.5 * (lh.x + rh.x), 0.5 * (lh.y + rh.y), 0.5 * (lh.z + rh.z), 1.0};
}

}  // namespace

TEST_CASE("centre_on_hips: uniform translation collapses to origin") {
    SkeletonFrame frame;
    frame.frame_index = 1;
    for (auto& j : frame.joints) j = Joint{5, 5, 5, 1};
    const SkeletonFrame centred = centre_on_hips(frame);
    for (const auto& j : centred.joints) {
        CHECK(j.x == 0.0);
        CHECK(j.y == 0.0);
        CHECK(j.z == 0.0);
    }
}

TEST_CASE("centre_on_hips: already-centred frame is unchanged") {
    SkeletonFrame frame;
    frame.frame_index = 1;
    frame.joint(JointId::left_hip) = Joint{2, 0, 0, 1};
    frame.joint(JointId::right_hip) = Joint{-2, 0, 0, 1};
    frame.joint(JointId::head) = Joint{0, 10, 0, 1};
    const SkeletonFrame centred = centre_on_hips(frame);
    for (int j = 0; j < kJointCount; ++j) {
        CHECK(centred.joints[j].x == frame.joints[j].x);
        CHECK(centred.joints[j].y == frame.joints[j].y);
        CHECK(centred.joints[j].z == frame.joints[j].z);
    }
}

TEST_CASE("centre_on_hips: recomputed hip midpoint is the origin") {
    Rng rng(101);
    for (int trial = 0; trial < 50; ++trial) {
        const SkeletonFrame centred = centre_on_hips(har_test::random_frame(rng, 1));
        const Joint c = hip_centre(centred);
        CHECK(std::abs(c.x) < 1e-9);
        CHECK(std::abs(c.y) < 1e-9);
        CHECK(std::abs(c.z) < 1e-9);
    }
}

TEST_CASE("mirror_x: negates x and swaps contralateral joints") {
    SkeletonFrame frame;
    frame.frame_index = 1;
    frame.joint(JointId::left_hand) = Joint{3, 1, 2, 0.9};
    const SkeletonFrame mirrored = mirror_x(frame);
    CHECK(mirrored.joint(JointId::right_hand).x == -3.0);
    CHECK(mirrored.joint(JointId::right_hand).y == 1.0);
    CHECK(mirrored.joint(JointId::right_hand).z == 2.0);
    CHECK(mirrored.joint(JointId::right_hand).confidence == 0.9);
    CHECK(mirrored.joint(JointId::left_hand).x == -0.0);
}

TEST_CASE("mirror_x is an involution on random centred frames") {
    Rng rng(102);
    for (int trial = 0; trial < 100; ++trial) {
        const SkeletonFrame frame = centre_on_hips(har_test::random_frame(rng, 1));
        const SkeletonFrame twice = mirror_x(mirror_x(frame));
        for (int j = 0; j < kJointCount; ++j) {
            CHECK(twice.joints[j].x == frame.joints[j].x);
            CHECK(twice.joints[j].y == frame.joints[j].y);
            CHECK(twice.joints[j].z == frame.joints[j].z);
        }
    }
}

TEST_CASE("mirror_x: sagittally symmetric pose maps to itself") {
    SkeletonFrame frame;
    frame.frame_index = 1;
    frame.joint(JointId::head) = Joint{0, 100, 0, 1};
    frame.joint(JointId::neck) = Joint{0, 80, 0, 1};
    frame.joint(JointId::torso) = Joint{0, 50, 0, 1};
    frame.joint(JointId::left_shoulder) = Joint{-20, 75, 0, 1};
    frame.joint(JointId::right_shoulder) = Joint{20, 75, 0, 1};
    frame.joint(JointId::left_elbow) = Joint{-35, 60, 5, 1};
    frame.joint(JointId::right_elbow) = Joint{35, 60, 5, 1};
    frame.joint(JointId::left_hip) = Joint{-12, 0, 0, 1};
    frame.joint(JointId::right_hip) = Joint{12, 0, 0, 1};
    frame.joint(JointId::left_knee) = Joint{-13, -40, 2, 1};
    frame.joint(JointId::right_knee) = Joint{13, -40, 2, 1};
    frame.joint(JointId::left_hand) = Joint{-40, 40, -10, 1};
    frame.joint(JointId::right_hand) = Joint{40, 40, -10, 1};
    frame.joint(JointId::left_foot) = Joint{-14, -80, 4, 1};
    frame.joint(JointId::right_foot) = Joint{14, -80, 4, 1};
    const SkeletonFrame mirrored = mirror_x(frame);
    for (int j = 0; j < kJointCount; ++j) {
        CHECK(mirrored.joints[j].x == frame.joints[j].x);
        CHECK(mirrored.joints[j].y == frame.joints[j].y);
        CHECK(mirrored.joints[j].z == frame.joints[j].z);
    }
}

TEST_CASE("normalize_neck_torso: 250 mm spacing scales to unit distance") {
    SkeletonFrame frame;
    frame.frame_index = 1;
    frame.joint(JointId::neck) = Joint{0, 250, 0, 1};
    frame.joint(JointId::torso) = Joint{0, 0, 0, 1};
    frame.joint(JointId::head) = Joint{0, 400, 0, 1};
    const SkeletonFrame normalized = normalize_neck_torso(frame);
    CHECK(normalized.joint(JointId::head).y == doctest::Approx(400.0 / 250.0).epsilon(1e-12));
    const double dx = normalized.joint(JointId::neck).x - normalized.joint(JointId::torso).x;
    const double dy = normalized.joint(JointId::neck).y - normalized.joint(JointId::torso).y;
    const double dz = normalized.joint(JointId::neck).z - normalized.joint(JointId::torso).z;
    CHECK(std::abs(std::sqrt(dx * dx + dy * dy + dz * dz) - 1.0) < 1e-9);
}

TEST_CASE("normalize_neck_torso: already-unit frame is unchanged") {
    SkeletonFrame frame;
    frame.frame_index = 1;
    frame.joint(JointId::neck) = Joint{0, 1, 0, 1};
    frame.joint(JointId::torso) = Joint{0, 0, 0, 1};
    frame.joint(JointId::left_hand) = Joint{0.25, 0.5, 0.1, 1};
    const SkeletonFrame normalized = normalize_neck_torso(frame);
    for (int j = 0; j < kJointCount; ++j) {
        CHECK(normalized.joints[j].x == frame.joints[j].x);
        CHECK(normalized.joints[j].y == frame.joints[j].y);
        CHECK(normalized.joints[j].z == frame.joints[j].z);
    }
}

TEST_CASE("normalize_neck_torso: scaled copies normalize identically") {
    Rng rng(103);
    for (int trial = 0; trial < 20; ++trial) {
        SkeletonFrame frame = centre_on_hips(har_test::random_frame(rng, 1));
        SkeletonFrame half = frame;
        SkeletonFrame twice = frame;
        for (int j = 0; j < kJointCount; ++j) {
            half.joints[j].x *= 0.5;
            half.joints[j].y *= 0.5;
            half.joints[j].z *= 0.5;
            twice.joints[j].x *= 2.0;
            twice.joints[j].y *= 2.0;
            twice.joints[j].z *= 2.0;
        }
        const SkeletonFrame na = normalize_neck_torso(half);
        const SkeletonFrame nb = normalize_neck_torso(twice);
        for (int j = 0; j < kJointCount; ++j) {
            CHECK(na.joints[j].x == doctest::Approx(nb.joints[j].x).epsilon(1e-12));
            CHECK(na.joints[j].y == doctest::Approx(nb.joints[j].y).epsilon(1e-12));
            CHECK(na.joints[j].z == doctest::Approx(nb.joints[j].z).epsilon(1e-12));
        }
    }
}

TEST_CASE("normalize_neck_torso: degenerate skeleton throws") {
    SkeletonFrame frame;
    frame.frame_index = 1;
    CHECK_THROWS_AS(normalize_neck_torso(frame), DegenerateSkeleton);
}

TEST_CASE("apply_preconditioning: counts and mirroring closure") {
    const Corpus corpus = generate_synthetic_corpus(21, 3, 2, 20);
    const std::size_t n = corpus.total_frames();

    const auto none_train = apply_preconditioning(corpus, PreconditionMode::none, DataRole::train);
    CHECK(total_vectors(none_train) == n);
    // raw values are preserved under mode none
    CHECK(none_train[0].poses[0] == to_pose_vector(corpus.recordings[0].frames[0]));

    const auto cm_train = apply_preconditioning(corpus, PreconditionMode::centre_mirror, DataRole::train);
    CHECK(total_vectors(cm_train) == 2 * n);

    const auto cm_test = apply_preconditioning(corpus, PreconditionMode::centre_mirror, DataRole::test);
    CHECK(total_vectors(cm_test) == n);

    const auto cmn_train =
        apply_preconditioning(corpus, PreconditionMode::centre_mirror_normalize, DataRole::train);
    CHECK(total_vectors(cmn_train) == 2 * n);

    // closure: the mirror image of every training vector is in the set
    std::set<Vec> pool;
    for (const auto& rec : cm_train) {
        for (const auto& v : rec.poses) pool.insert(v);
    }
    for (const auto& rec : cm_train) {
        for (const auto& v : rec.poses) {
            SkeletonFrame frame;
            for (int j = 0; j < kJointCount; ++j) {
                frame.joints[j].x = v[3 * j + 0];
                frame.joints[j].y = v[3 * j + 1];
                frame.joints[j].z = v[3 * j + 2];
            }
            // std::less treats -0.0 and 0.0 as equivalent, so the set lookup
            // is exact
            const Vec mirrored = to_pose_vector(mirror_x(frame));
            CHECK(pool.count(mirrored) == 1);
        }
    }

    // provenance tags preserved
    for (const auto& rec : cm_train) {
        const auto& source = corpus.recordings[static_cast<std::size_t>(rec.recording_index)];
        CHECK(rec.subject_id == source.subject_id);
        CHECK(rec.label == source.label);
    }
}

TEST_CASE("compute_velocities: constant, linear and telescoping cases") {
    const Vec u{1.0, -2.0, 0.5};

    std::vector<Vec> constant(6, Vec{3.0, 3.0, 3.0});
    for (const Vec& v : compute_velocities(constant)) {
        CHECK(v == Vec{0.0, 0.0, 0.0});
    }

    std::vector<Vec> linear;
    for (int k = 1; k <= 5; ++k) linear.push_back(Vec{k * u[0], k * u[1], k * u[2]});
    const auto velocities = compute_velocities(linear);
    REQUIRE(velocities.size() == 4);
    for (const Vec& v : velocities) {
        CHECK(v[0] == doctest::Approx(u[0]).epsilon(1e-12));
        CHECK(v[1] == doctest::Approx(u[1]).epsilon(1e-12));
        CHECK(v[2] == doctest::Approx(u[2]).epsilon(1e-12));
    }

    Rng rng(104);
    std::vector<Vec> walk;
    for (int k = 0; k < 10; ++k) {
        Vec v(5);
        for (double& x : v) x = rng.uniform(-10, 10);
        walk.push_back(v);
    }
    const auto deltas = compute_velocities(walk);
    Vec sum(5, 0.0);
    for (const Vec& d : deltas) {
        for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += d[i];
    }
    for (std::size_t i = 0; i < sum.size(); ++i) {
        CHECK(std::abs(sum[i] - (walk.back()[i] - walk.front()[i])) < 1e-9);
    }

    CHECK(compute_velocities({Vec{1.0}}).empty());
    CHECK(compute_velocities({}).empty());
}

TEST_CASE("sliding_windows: count law and contents") {
    std::vector<Vec> vectors;
    for (int k = 0; k < 5; ++k) vectors.push_back(Vec{static_cast<double>(k), static_cast<double>(-k)});

    const auto w3 = sliding_windows(vectors, 3);
    REQUIRE(w3.size() == 3);
    CHECK(w3[0] == Vec{0, 0, 1, -1, 2, -2});
    CHECK(w3[2] == Vec{2, -2, 3, -3, 4, -4});

    const auto w1 = sliding_windows(vectors, 1);
    REQUIRE(w1.size() == vectors.size());
    for (std::size_t i = 0; i < vectors.size(); ++i) CHECK(w1[i] == vectors[i]);

    CHECK(sliding_windows({vectors[0], vectors[1]}, 3).empty());

    Rng rng(105);
    for (int trial = 0; trial < 30; ++trial) {
        const int n = 1 + static_cast<int>(rng.below(40));
        const int w = 1 + static_cast<int>(rng.below(6));
        std::vector<Vec> data(static_cast<std::size_t>(n), Vec{1.0});
        const auto windows = sliding_windows(data, w);
        CHECK(static_cast<long>(windows.size()) == std::max(0L, static_cast<long>(n) - w + 1));
    }
}
