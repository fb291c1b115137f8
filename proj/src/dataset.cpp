#include "har/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace har {

namespace {

using json = nlohmann::ordered_json;

const std::array<std::string, kActivityCount> kActivityNames = {
    "brushing teeth",
    "cooking (chopping)",
    "cooking (stirring)",
    "drinking water",
    "opening pill container",
    "random",
    "relaxing on couch",
    "rinsing mouth with water",
    "still",
    "talking on couch",
    "talking on the phone",
    "wearing contact lenses",
    "working on computer",
    "writing on whiteboard",
};

// Names as they appear in CAD-60 activityLabel.txt files.
const std::array<std::string, kActivityCount> kActivityFileNames = {
    "brushing_teeth",
    "cooking_chopping",
    "cooking_stirring",
    "drinking_water",
    "opening_pill_container",
    "random",
    "relaxing_on_couch",
    "rinsing_mouth_with_water",
    "still",
    "talking_on_couch",
    "talking_on_the_phone",
    "wearing_contact_lenses",
    "working_on_computer",
    "writing_on_whiteboard",
};

const std::array<std::string, kSceneCount> kSceneNames = {
    "bathroom", "bedroom", "kitchen", "livingroom", "office",
};

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

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> tokens;
    std::string token;
    std::stringstream ss(line);
    while (std::getline(ss, token, ',')) tokens.push_back(trimmed(token));
    // A trailing comma yields one empty token at the end; drop such padding.
    while (!tokens.empty() && tokens.back().empty()) tokens.pop_back();
    return tokens;
}

}  // namespace

const std::string& activity_name(Activity a) {
    return kActivityNames[static_cast<int>(a)];
}

std::optional<Activity> activity_from_name(std::string_view name) {
    const std::string n = lowered(trimmed(name));
    for (int i = 0; i < kActivityCount; ++i) {
        if (n == kActivityNames[i] || n == kActivityFileNames[i]) return static_cast<Activity>(i);
    }
    return std::nullopt;
}

std::vector<Activity> all_activities() {
    std::vector<Activity> out;
    out.reserve(kActivityCount);
    for (int i = 0; i < kActivityCount; ++i) out.push_back(static_cast<Activity>(i));
    return out;
}

const std::string& scene_name(Scene s) {
    return kSceneNames[static_cast<int>(s)];
}

std::optional<Scene> scene_from_name(std::string_view name) {
    std::string n = lowered(trimmed(name));
    std::erase_if(n, [](char c) { return c == ' ' || c == '_'; });  // "living room" etc.
    for (int i = 0; i < kSceneCount; ++i) {
        if (n == kSceneNames[i]) return static_cast<Scene>(i);
    }
    return std::nullopt;
}

std::vector<Scene> all_scenes() {
    std::vector<Scene> out;
    out.reserve(kSceneCount);
    for (int i = 0; i < kSceneCount; ++i) out.push_back(static_cast<Scene>(i));
    return out;
}

std::vector<int> Corpus::subject_ids() const {
    std::set<int> ids;
    for (const auto& rec : recordings) ids.insert(rec.subject_id);
    return std::vector<int>(ids.begin(), ids.end());
}

std::vector<Activity> Corpus::labels_present() const {
    std::set<Activity> labels;
    for (const auto& rec : recordings) labels.insert(rec.label);
    return std::vector<Activity>(labels.begin(), labels.end());
}

std::size_t Corpus::total_frames() const {
    std::size_t n = 0;
    for (const auto& rec : recordings) n += rec.frames.size();
    return n;
}

bool corpus_equal(const Corpus& a, const Corpus& b) {
    if (a.recordings.size() != b.recordings.size()) return false;
    for (std::size_t i = 0; i < a.recordings.size(); ++i) {
        const auto& ra = a.recordings[i];
        const auto& rb = b.recordings[i];
        if (ra.subject_id != rb.subject_id || ra.label != rb.label || ra.scenes != rb.scenes ||
            ra.frame_rate != rb.frame_rate || ra.frames.size() != rb.frames.size())
            return false;
        for (std::size_t k = 0; k < ra.frames.size(); ++k) {
            for (int j = 0; j < kJointCount; ++j) {
                const Joint& ja = ra.frames[k].joints[j];
                const Joint& jb = rb.frames[k].joints[j];
                if (ja.x != jb.x || ja.y != jb.y || ja.z != jb.z) return false;
            }
        }
    }
    return true;
}

bool is_scene_wildcard(Activity a) {
    return a == Activity::random_movements || a == Activity::still;
}

const SceneMap& default_scene_map() {
    static const SceneMap map = {
        {Scene::bathroom,
         {Activity::brushing_teeth, Activity::rinsing_mouth_with_water, Activity::wearing_contact_lenses}},
        {Scene::bedroom,
         {Activity::talking_on_the_phone, Activity::drinking_water, Activity::opening_pill_container}},
        {Scene::kitchen,
         {Activity::cooking_chopping, Activity::cooking_stirring, Activity::drinking_water,
          Activity::opening_pill_container}},
        {Scene::livingroom,
         {Activity::talking_on_the_phone, Activity::drinking_water, Activity::talking_on_couch,
          Activity::relaxing_on_couch}},
        {Scene::office,
         {Activity::talking_on_the_phone, Activity::writing_on_whiteboard, Activity::drinking_water,
          Activity::working_on_computer}},
    };
    return map;
}

SceneMap scene_map_from_csv(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw DataError("scene map file not readable: " + file.string());
    SceneMap map;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string stripped = trimmed(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        auto tokens = split_csv_line(stripped);
        if (tokens.size() != 2)
            throw ParseError("scene map line " + std::to_string(lineno) + ": expected 'scene,activity'");
        auto scene = scene_from_name(tokens[0]);
        auto act = activity_from_name(tokens[1]);
        if (!scene) throw ParseError("scene map line " + std::to_string(lineno) + ": unknown scene '" + tokens[0] + "'");
        if (!act) throw ParseError("scene map line " + std::to_string(lineno) + ": unknown activity '" + tokens[1] + "'");
        map[*scene].push_back(*act);
    }
    if (map.empty()) throw DataError("scene map file defines no assignments: " + file.string());
    return map;
}

void write_scene_map_csv(const SceneMap& map, const std::filesystem::path& file) {
    std::ofstream out(file);
    if (!out) throw DataError("cannot write scene map: " + file.string());
    out << "# scene,activity\n";
    for (const auto& [scene, activities] : map) {
        for (Activity a : activities) out << scene_name(scene) << "," << activity_name(a) << "\n";
    }
}

// --- CAD-60 parsing ----------------------------------------------------------

namespace {

constexpr int kOrientedJoints = 11;
constexpr int kPositionOnlyJoints = 4;
// frame id + 11*(9 orientation + 1 conf + 3 position + 1 conf) + 4*(3 position + 1 conf)
constexpr std::size_t kTokensPerLine = 1 + kOrientedJoints * 14 + kPositionOnlyJoints * 4;

double parse_number(const std::string& token, int lineno) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(token, &pos);
        if (pos != token.size()) throw std::invalid_argument("trailing characters");
        if (!std::isfinite(v)) throw std::invalid_argument("not finite");
        return v;
    } catch (const std::exception&) {
        throw ParseError("line " + std::to_string(lineno) + ": bad numeric token '" + token + "'");
    }
}

}  // namespace

std::vector<SkeletonFrame> parse_cad60_skeleton_file(std::istream& in, Warnings* warnings) {
    std::vector<SkeletonFrame> frames;
    std::string line;
    int lineno = 0;
    bool saw_terminator = false;
    int previous_index = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const std::string stripped = trimmed(line);
        if (stripped.empty()) continue;
        if (stripped == "END") {
            saw_terminator = true;
            break;
        }
        const auto tokens = split_csv_line(stripped);
        if (tokens.size() != kTokensPerLine)
            throw ParseError("line " + std::to_string(lineno) + ": expected " + std::to_string(kTokensPerLine) +
                             " values, got " + std::to_string(tokens.size()));

        SkeletonFrame frame;
        frame.frame_index = static_cast<int>(parse_number(tokens[0], lineno));
        if (frame.frame_index <= previous_index)
            throw ParseError("line " + std::to_string(lineno) + ": frame index " +
                             std::to_string(frame.frame_index) + " not strictly increasing");
        previous_index = frame.frame_index;

        std::size_t t = 1;
        for (int j = 0; j < kOrientedJoints; ++j) {
            t += 10;  // 9 orientation values + orientation confidence, discarded
            Joint& joint = frame.joints[j];
            joint.x = parse_number(tokens[t++], lineno);
            joint.y = parse_number(tokens[t++], lineno);
            joint.z = parse_number(tokens[t++], lineno);
            joint.confidence = parse_number(tokens[t++], lineno);
        }
        for (int j = 0; j < kPositionOnlyJoints; ++j) {
            Joint& joint = frame.joints[kOrientedJoints + j];
            joint.x = parse_number(tokens[t++], lineno);
            joint.y = parse_number(tokens[t++], lineno);
            joint.z = parse_number(tokens[t++], lineno);
            joint.confidence = parse_number(tokens[t++], lineno);
        }
        frames.push_back(frame);
    }
    if (!saw_terminator)
        warn(warnings, "skeleton file has no END terminator; kept " + std::to_string(frames.size()) + " frames");
    return frames;
}

namespace {

std::optional<int> trailing_number(const std::string& name) {
    std::size_t end = name.size();
    std::size_t begin = end;
    while (begin > 0 && std::isdigit(static_cast<unsigned char>(name[begin - 1]))) --begin;
    if (begin == end) return std::nullopt;
    return std::stoi(name.substr(begin, end - begin));
}

std::vector<Scene> scenes_for_label(Activity label, const SceneMap& scene_map) {
    std::vector<Scene> scenes;
    if (is_scene_wildcard(label)) {
        for (const auto& [scene, unused] : scene_map) scenes.push_back(scene);
        return scenes;
    }
    for (const auto& [scene, activities] : scene_map) {
        if (std::find(activities.begin(), activities.end(), label) != activities.end())
            scenes.push_back(scene);
    }
    return scenes;
}

}  // namespace

Corpus load_corpus(const std::filesystem::path& root, const SceneMap& scene_map, Warnings* warnings) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(root)) throw DataError("corpus root is not a directory: " + root.string());

    struct SubjectDir {
        int subject_id;
        fs::path dir;
    };
    std::vector<SubjectDir> subjects;
    for (const auto& entry : fs::directory_iterator(root)) {
        if (!entry.is_directory()) continue;
        if (!fs::exists(entry.path() / "activityLabel.txt")) continue;
        const auto id = trailing_number(entry.path().filename().string());
        if (!id) {
            warn(warnings, "skipping subject folder without numeric suffix: " + entry.path().string());
            continue;
        }
        subjects.push_back({*id, entry.path()});
    }
    std::sort(subjects.begin(), subjects.end(),
              [](const SubjectDir& a, const SubjectDir& b) { return a.subject_id < b.subject_id; });

    Corpus corpus;
    corpus.provenance = Provenance::cad60_raw;
    for (const auto& subject : subjects) {
        std::ifstream index(subject.dir / "activityLabel.txt");
        if (!index) {
            warn(warnings, "cannot read label index in " + subject.dir.string());
            continue;
        }
        std::string line;
        int lineno = 0;
        std::vector<std::pair<std::string, Activity>> entries;
        while (std::getline(index, line)) {
            ++lineno;
            const std::string stripped = trimmed(line);
            if (stripped.empty()) continue;
            if (stripped == "END") break;
            const auto tokens = split_csv_line(stripped);
            if (tokens.size() < 2) {
                warn(warnings, subject.dir.string() + "/activityLabel.txt line " + std::to_string(lineno) +
                                   ": expected 'id,label'");
                continue;
            }
            const auto label = activity_from_name(tokens[1]);
            if (!label) {
                warn(warnings, "rejecting recording " + tokens[0] + ": unknown label '" + tokens[1] + "'");
                continue;
            }
            entries.emplace_back(tokens[0], *label);
        }
        std::sort(entries.begin(), entries.end());
        for (const auto& [id, label] : entries) {
            const fs::path file = subject.dir / (id + ".txt");
            std::ifstream data(file);
            if (!data) {
                warn(warnings, "missing skeleton file " + file.string());
                continue;
            }
            ActionRecording rec;
            rec.subject_id = subject.subject_id;
            rec.label = label;
            rec.scenes = scenes_for_label(label, scene_map);
            rec.frames = parse_cad60_skeleton_file(data, warnings);
            rec.source_id = id;
            if (rec.frames.empty()) {
                warn(warnings, "recording " + id + " has no frames; skipped");
                continue;
            }
            corpus.recordings.push_back(std::move(rec));
        }
    }
    if (corpus.recordings.empty()) throw DataError("no recordings found under " + root.string());
    if (corpus.subject_ids().size() < 4)
        warn(warnings, "corpus has only " + std::to_string(corpus.subject_ids().size()) + " subjects");
    return corpus;
}

// --- synthetic corpora ---------------------------------------------------------

namespace {

// Neutral standing skeleton, millimetres, camera ~2.5 m away.
const std::array<std::array<double, 3>, kJointCount> kBaseSkeleton = {{
    {0, 1650, 2500},     // head
    {0, 1500, 2500},     // neck
    {0, 1250, 2500},     // torso
    {-200, 1450, 2500},  // left shoulder
    {-350, 1200, 2480},  // left elbow
    {200, 1450, 2500},   // right shoulder
    {350, 1200, 2480},   // right elbow
    {-120, 900, 2500},   // left hip
    {-130, 500, 2510},   // left knee
    {120, 900, 2500},    // right hip
    {130, 500, 2510},    // right knee
    {-400, 950, 2450},   // left hand
    {400, 950, 2450},    // right hand
    {-140, 100, 2520},   // left foot
    {140, 100, 2520},    // right foot
}};

struct MotionTemplate {
    // Per joint, per axis: amplitude (mm), frequency (Hz), phase (rad).
    std::array<std::array<double, 3>, kJointCount> amplitude;
    std::array<std::array<double, 3>, kJointCount> frequency;
    std::array<std::array<double, 3>, kJointCount> phase;
};

MotionTemplate make_template(Rng& rng) {
    MotionTemplate t;
    for (int j = 0; j < kJointCount; ++j) {
        for (int a = 0; a < 3; ++a) {
            t.amplitude[j][a] = rng.uniform(15.0, 70.0);
            t.frequency[j][a] = rng.uniform(0.3, 1.5);
            t.phase[j][a] = rng.uniform(0.0, 2.0 * 3.14159265358979323846);
        }
    }
    return t;
}

}  // namespace

Corpus generate_synthetic_corpus(std::uint64_t seed, int subjects, int classes, int frames_per_recording) {
    if (subjects < 2) throw DataError("synthetic corpus needs at least 2 subjects");
    if (classes < 2 || classes > kActivityCount)
        throw DataError("synthetic corpus needs between 2 and " + std::to_string(kActivityCount) + " classes");
    if (frames_per_recording < 12) throw DataError("synthetic corpus needs at least 12 frames per recording");

    // Class templates are shared across subjects and drawn first so the
    // corpus is a pure function of (seed, subjects, classes, frames).
    std::vector<MotionTemplate> templates;
    templates.reserve(static_cast<std::size_t>(classes));
    Rng template_rng(mix_seed(seed, 0x7e3a));
    for (int c = 0; c < classes; ++c) templates.push_back(make_template(template_rng));

    Corpus corpus;
    corpus.provenance = Provenance::synthetic;
    for (int p = 1; p <= subjects; ++p) {
        const double scale = 0.85 + 0.3 * static_cast<double>(p - 1) / static_cast<double>(subjects - 1);
        Rng subject_rng(mix_seed(seed, 0x51, static_cast<std::uint64_t>(p)));
        const double off_x = subject_rng.uniform(-500.0, 500.0);
        const double off_y = subject_rng.uniform(-100.0, 100.0);
        const double off_z = subject_rng.uniform(-400.0, 400.0);
        for (int c = 0; c < classes; ++c) {
            Rng noise_rng(mix_seed(seed, static_cast<std::uint64_t>(p), static_cast<std::uint64_t>(c), 0x9d));
            ActionRecording rec;
            rec.subject_id = p;
            rec.label = static_cast<Activity>(c);
            rec.scenes = all_scenes();
            rec.source_id = "synthetic_s" + std::to_string(p) + "_c" + std::to_string(c);
            rec.frames.reserve(static_cast<std::size_t>(frames_per_recording));
            const MotionTemplate& tpl = templates[static_cast<std::size_t>(c)];
            for (int k = 1; k <= frames_per_recording; ++k) {
                SkeletonFrame frame;
                frame.frame_index = k;
                const double t = static_cast<double>(k) / kFrameRate;
                for (int j = 0; j < kJointCount; ++j) {
                    std::array<double, 3> pos;
                    for (int a = 0; a < 3; ++a) {
                        const double osc = tpl.amplitude[j][a] *
                                           std::sin(2.0 * 3.14159265358979323846 * tpl.frequency[j][a] * t +
                                                    tpl.phase[j][a]);
                        pos[a] = (kBaseSkeleton[j][a] + osc) * scale + noise_rng.gaussian() * 30.0;
                    }
                    frame.joints[j] = Joint{pos[0] + off_x, pos[1] + off_y, pos[2] + off_z, 1.0};
                }
                rec.frames.push_back(frame);
            }
            corpus.recordings.push_back(std::move(rec));
        }
    }
    return corpus;
}

// --- splits -------------------------------------------------------------------

LosoSplit split_loso(const Corpus& corpus, int held_out_subject) {
    const auto ids = corpus.subject_ids();
    if (std::find(ids.begin(), ids.end(), held_out_subject) == ids.end())
        throw DataError("subject " + std::to_string(held_out_subject) + " not present in corpus");
    LosoSplit split;
    split.held_out_subject = held_out_subject;
    split.train.provenance = corpus.provenance;
    split.test.provenance = corpus.provenance;
    for (const auto& rec : corpus.recordings) {
        (rec.subject_id == held_out_subject ? split.test : split.train).recordings.push_back(rec);
    }
    return split;
}

Corpus scene_subset(const Corpus& corpus, Scene scene, bool include_random_still) {
    Corpus out;
    out.provenance = corpus.provenance;
    for (const auto& rec : corpus.recordings) {
        if (is_scene_wildcard(rec.label) && !include_random_still) continue;
        if (std::find(rec.scenes.begin(), rec.scenes.end(), scene) == rec.scenes.end()) continue;
        out.recordings.push_back(rec);
    }
    return out;
}

// --- corpus cache ---------------------------------------------------------------

namespace {

json recording_to_json(const ActionRecording& rec) {
    json doc;
    doc["subject"] = rec.subject_id;
    json scenes = json::array();
    for (Scene s : rec.scenes) scenes.push_back(scene_name(s));
    doc["scenes"] = std::move(scenes);
    doc["label"] = activity_name(rec.label);
    doc["frame_rate"] = rec.frame_rate;
    json frames = json::array();
    for (const auto& frame : rec.frames) {
        json row = json::array();
        for (int j = 0; j < kJointCount; ++j) {
            row.push_back(frame.joints[j].x);
            row.push_back(frame.joints[j].y);
            row.push_back(frame.joints[j].z);
        }
        frames.push_back(std::move(row));
    }
    doc["frames"] = std::move(frames);
    return doc;
}

ActionRecording recording_from_json(const json& doc, const std::string& origin);

ActionRecording recording_from_json_checked(const json& doc, const std::string& origin) {
    try {
        return recording_from_json(doc, origin);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(origin + ": not a recording document: " + e.what());
    }
}

ActionRecording recording_from_json(const json& doc, const std::string& origin) {
    ActionRecording rec;
    rec.subject_id = doc.at("subject").get<int>();
    for (const auto& s : doc.at("scenes")) {
        const auto scene = scene_from_name(s.get<std::string>());
        if (!scene) throw ParseError(origin + ": unknown scene '" + s.get<std::string>() + "'");
        rec.scenes.push_back(*scene);
    }
    const auto label = activity_from_name(doc.at("label").get<std::string>());
    if (!label) throw ParseError(origin + ": unknown label '" + doc.at("label").get<std::string>() + "'");
    rec.label = *label;
    rec.frame_rate = doc.at("frame_rate").get<double>();
    int index = 0;
    for (const auto& row : doc.at("frames")) {
        if (row.size() != static_cast<std::size_t>(kPoseDim))
            throw ParseError(origin + ": frame row has " + std::to_string(row.size()) + " values, expected " +
                             std::to_string(kPoseDim));
        SkeletonFrame frame;
        frame.frame_index = ++index;
        for (int j = 0; j < kJointCount; ++j) {
            frame.joints[j].x = row[3 * j + 0].get<double>();
            frame.joints[j].y = row[3 * j + 1].get<double>();
            frame.joints[j].z = row[3 * j + 2].get<double>();
            frame.joints[j].confidence = 1.0;
        }
        rec.frames.push_back(frame);
    }
    if (rec.frames.empty()) throw ParseError(origin + ": recording has no frames");
    rec.source_id = origin;
    return rec;
}

}  // namespace

void save_corpus_cache(const Corpus& corpus, const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    int index = 0;
    for (const auto& rec : corpus.recordings) {
        char name[32];
        std::snprintf(name, sizeof(name), "rec_%05d.json", index++);
        std::ofstream out(dir / name);
        if (!out) throw DataError("cannot write corpus cache file " + (dir / name).string());
        out << recording_to_json(rec).dump(0) << "\n";
    }
}

Corpus load_corpus_cache(const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(dir)) throw DataError("corpus cache is not a directory: " + dir.string());
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) throw DataError("no recording documents under " + dir.string());
    Corpus corpus;
    corpus.provenance = Provenance::synthetic;
    for (const auto& file : files) {
        std::ifstream in(file);
        if (!in) throw DataError("cannot read " + file.string());
        json doc;
        try {
            in >> doc;
        } catch (const std::exception& e) {
            throw ParseError(file.string() + ": " + e.what());
        }
        corpus.recordings.push_back(recording_from_json_checked(doc, file.filename().string()));
    }
    return corpus;
}

bool looks_like_corpus_cache(const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(dir)) return false;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".json") return true;
    }
    return false;
}

Corpus load_any_corpus(const std::filesystem::path& path, const SceneMap& scene_map, Warnings* warnings) {
    if (looks_like_corpus_cache(path)) return load_corpus_cache(path);
    return load_corpus(path, scene_map, warnings);
}

}  // namespace har
