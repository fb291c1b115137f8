#pragma once

#include <unistd.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "har/common.hpp"
#include "har/dataset.hpp"

namespace har_test {

inline har::SkeletonFrame random_frame(har::Rng& rng, int frame_index) {
    har::SkeletonFrame frame;
    frame.frame_index = frame_index;
    for (auto& joint : frame.joints) {
        joint.x = rng.uniform(-800.0, 800.0);
        joint.y = rng.uniform(0.0, 1800.0);
        joint.z = rng.uniform(1500.0, 3500.0);
        joint.confidence = rng.uniform(0.0, 1.0);
    }
    return frame;
}

// Emits one raw CAD-60 data line for the given frame. Written independently
// of the parser so it can serve as its oracle: 11 joints with orientation
// blocks (zeros here), 4 position-only joints, comma separators and the
// dataset's trailing comma.
inline std::string cad60_line(const har::SkeletonFrame& frame) {
    std::ostringstream out;
    char buffer[64];
    const auto put = [&](double v) {
        std::snprintf(buffer, sizeof(buffer), "%.17g", v);
        out << buffer << ",";
    };
    out << frame.frame_index << ",";
    for (int j = 0; j < 11; ++j) {
        for (int o = 0; o < 9; ++o) put(o % 4 == 0 ? 1.0 : 0.0);  // orientation matrix
        put(1.0);                                                 // orientation confidence
        put(frame.joints[j].x);
        put(frame.joints[j].y);
        put(frame.joints[j].z);
        put(frame.joints[j].confidence);
    }
    for (int j = 11; j < 15; ++j) {
        put(frame.joints[j].x);
        put(frame.joints[j].y);
        put(frame.joints[j].z);
        put(frame.joints[j].confidence);
    }
    std::string line = out.str();
    return line;
}

inline std::string cad60_file_text(const std::vector<har::SkeletonFrame>& frames, bool terminated = true) {
    std::ostringstream out;
    for (const auto& frame : frames) out << cad60_line(frame) << "\n";
    if (terminated) out << "END\n";
    return out.str();
}

class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static int counter = 0;
        path_ = std::filesystem::temp_directory_path() /
                ("har_test_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    out << text;
}

inline std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

// Writes a minimal raw CAD-60 tree: one folder per subject with an
// activityLabel.txt index and one skeleton file per (subject, label).
inline void write_cad60_tree(const std::filesystem::path& root,
                             const std::vector<int>& subjects,
                             const std::vector<std::string>& labels,
                             int frames_per_recording,
                             har::Rng& rng) {
    for (int subject : subjects) {
        const auto dir = root / ("data" + std::to_string(subject));
        std::filesystem::create_directories(dir);
        std::ostringstream index;
        int next_id = 1000 * subject;
        for (const std::string& label : labels) {
            const std::string id = std::to_string(next_id++);
            index << id << "," << label << ",\n";
            std::vector<har::SkeletonFrame> frames;
            for (int k = 1; k <= frames_per_recording; ++k) frames.push_back(random_frame(rng, k));
            write_text(dir / (id + ".txt"), cad60_file_text(frames));
        }
        index << "END\n";
        write_text(dir / "activityLabel.txt", index.str());
    }
}

}  // namespace har_test
