#include "har/reports.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

namespace har {

using json = nlohmann::ordered_json;

std::string format_percent(double fraction) {
    char buffer[32];
    std::snprintf(buffer, sizeof(buffer), "%.2f", fraction * 100.0);
    return buffer;
}

namespace {

std::string optional_percent(const std::optional<double>& fraction) {
    return fraction ? format_percent(*fraction) : std::string();
}

std::string scene_label(const std::optional<Scene>& scene) {
    return scene ? scene_name(*scene) : std::string("all");
}

// Fixed column order for the comparison grid.
const std::array<MethodKind, 4> kMethodOrder = {MethodKind::svm, MethodKind::knn, MethodKind::gng,
                                                MethodKind::gwr};
const std::array<PreconditionMode, 3> kModeOrder = {
    PreconditionMode::none, PreconditionMode::centre_mirror, PreconditionMode::centre_mirror_normalize};

}  // namespace

std::string render_grid_csv(const std::vector<AggregateReport>& cells) {
    std::set<MethodKind> methods;
    std::set<PreconditionMode> modes;
    std::map<std::pair<int, int>, double> values;
    for (const AggregateReport& cell : cells) {
        methods.insert(cell.method);
        modes.insert(cell.mode);
        values[{static_cast<int>(cell.mode), static_cast<int>(cell.method)}] = cell.global_accuracy;
    }
    std::ostringstream out;
    out << "mode";
    for (MethodKind m : kMethodOrder) {
        if (methods.count(m)) out << "," << method_name(m);
    }
    out << "\n";
    for (PreconditionMode mode : kModeOrder) {
        if (!modes.count(mode)) continue;
        out << precondition_mode_name(mode);
        for (MethodKind m : kMethodOrder) {
            if (!methods.count(m)) continue;
            const auto it = values.find({static_cast<int>(mode), static_cast<int>(m)});
            out << ",";
            if (it != values.end()) out << format_percent(it->second);
        }
        out << "\n";
    }
    return out.str();
}

std::string render_results_csv(const std::vector<AggregateReport>& cells) {
    std::ostringstream out;
    out << "method,mode,policy,scene,subject,classes,total,correct,accuracy_pct\n";
    for (const AggregateReport& cell : cells) {
        for (const SceneSubjectResult& r : cell.results) {
            out << method_name(r.method) << "," << precondition_mode_name(r.mode) << ","
                << scene_policy_name(cell.policy) << "," << scene_label(r.scene) << "," << r.subject << ","
                << r.confusion.classes().size() << "," << r.confusion.total() << "," << r.confusion.trace()
                << "," << format_percent(r.accuracy) << "\n";
        }
    }
    return out.str();
}

std::string render_scene_csv(const AggregateReport& cell) {
    std::ostringstream out;
    out << "scene,activity,precision_mean_pct,precision_std_pct,recall_mean_pct,recall_std_pct\n";
    std::vector<double> scene_precisions, scene_recalls;
    for (const SceneReport& scene : cell.scenes) {
        std::vector<double> precisions, recalls;
        for (const ClassStat& stat : scene.per_class) {
            out << scene_label(scene.scene) << "," << activity_name(stat.label) << ","
                << optional_percent(stat.precision_mean) << "," << optional_percent(stat.precision_stddev)
                << "," << optional_percent(stat.recall_mean) << "," << optional_percent(stat.recall_stddev)
                << "\n";
            if (stat.precision_mean) precisions.push_back(*stat.precision_mean);
            if (stat.recall_mean) recalls.push_back(*stat.recall_mean);
        }
        const auto mean = [](const std::vector<double>& v) -> std::optional<double> {
            if (v.empty()) return std::nullopt;
            double s = 0.0;
            for (double x : v) s += x;
            return s / static_cast<double>(v.size());
        };
        const auto p = mean(precisions);
        const auto r = mean(recalls);
        out << scene_label(scene.scene) << ",average," << optional_percent(p) << ",,"
            << optional_percent(r) << ",\n";
        if (p) scene_precisions.push_back(*p);
        if (r) scene_recalls.push_back(*r);
    }
    const auto mean = [](const std::vector<double>& v) -> std::optional<double> {
        if (v.empty()) return std::nullopt;
        double s = 0.0;
        for (double x : v) s += x;
        return s / static_cast<double>(v.size());
    };
    out << "global,average," << optional_percent(mean(scene_precisions)) << ",,"
        << optional_percent(mean(scene_recalls)) << ",\n";
    return out.str();
}

std::string render_confusion_csv(const ConfusionMatrix& matrix) {
    std::ostringstream out;
    out << "true\\predicted";
    for (Activity a : matrix.classes()) out << "," << activity_name(a);
    out << "\n";
    for (Activity truth : matrix.classes()) {
        out << activity_name(truth);
        for (Activity predicted : matrix.classes()) out << "," << matrix.count(truth, predicted);
        out << "\n";
    }
    return out.str();
}

std::string render_confusion_svg(const ConfusionMatrix& matrix) {
    const int n = static_cast<int>(matrix.classes().size());
    const int cell = 28;
    const int margin = 150;
    const int size = margin + n * cell + 10;
    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\"" << size << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    std::vector<long> row_totals(static_cast<std::size_t>(n), 0);
    for (int t = 0; t < n; ++t) {
        for (int p = 0; p < n; ++p)
            row_totals[static_cast<std::size_t>(t)] +=
                matrix.count(matrix.classes()[static_cast<std::size_t>(t)],
                             matrix.classes()[static_cast<std::size_t>(p)]);
    }
    for (int t = 0; t < n; ++t) {
        const Activity truth = matrix.classes()[static_cast<std::size_t>(t)];
        out << "<text x=\"" << margin - 6 << "\" y=\"" << margin + t * cell + cell / 2 + 4
            << "\" text-anchor=\"end\" font-size=\"10\">" << activity_name(truth) << "</text>\n";
        for (int p = 0; p < n; ++p) {
            const Activity predicted = matrix.classes()[static_cast<std::size_t>(p)];
            const long count = matrix.count(truth, predicted);
            const double share = row_totals[static_cast<std::size_t>(t)] > 0
                                     ? static_cast<double>(count) /
                                           static_cast<double>(row_totals[static_cast<std::size_t>(t)])
                                     : 0.0;
            const int shade = 255 - static_cast<int>(std::lround(share * 205.0));
            out << "<rect x=\"" << margin + p * cell << "\" y=\"" << margin + t * cell << "\" width=\""
                << cell << "\" height=\"" << cell << "\" fill=\"rgb(" << shade << "," << shade
                << ",255)\" stroke=\"#ccc\"/>\n";
            if (count > 0) {
                out << "<text x=\"" << margin + p * cell + cell / 2 << "\" y=\""
                    << margin + t * cell + cell / 2 + 4 << "\" text-anchor=\"middle\" font-size=\"9\">"
                    << count << "</text>\n";
            }
        }
    }
    for (int p = 0; p < n; ++p) {
        const int cx = margin + p * cell + cell / 2;
        out << "<text x=\"" << cx << "\" y=\"" << margin - 8 << "\" text-anchor=\"start\" font-size=\"10\""
            << " transform=\"rotate(-60 " << cx << " " << margin - 8 << ")\">"
            << activity_name(matrix.classes()[static_cast<std::size_t>(p)]) << "</text>\n";
    }
    out << "</svg>\n";
    return out.str();
}

namespace {

json class_stat_json(const ClassStat& stat) {
    json entry;
    entry["activity"] = activity_name(stat.label);
    if (stat.precision_mean) entry["precision_mean"] = *stat.precision_mean;
    if (stat.precision_stddev) entry["precision_stddev"] = *stat.precision_stddev;
    if (stat.recall_mean) entry["recall_mean"] = *stat.recall_mean;
    if (stat.recall_stddev) entry["recall_stddev"] = *stat.recall_stddev;
    return entry;
}

json confusion_json(const ConfusionMatrix& matrix) {
    json doc;
    json classes = json::array();
    for (Activity a : matrix.classes()) classes.push_back(activity_name(a));
    doc["classes"] = std::move(classes);
    json rows = json::array();
    for (Activity truth : matrix.classes()) {
        json row = json::array();
        for (Activity predicted : matrix.classes()) row.push_back(matrix.count(truth, predicted));
        rows.push_back(std::move(row));
    }
    doc["counts"] = std::move(rows);
    return doc;
}

}  // namespace

std::string render_report_json(const std::vector<AggregateReport>& cells) {
    json doc;
    json cell_array = json::array();
    for (const AggregateReport& cell : cells) {
        json c;
        c["method"] = method_name(cell.method);
        c["mode"] = precondition_mode_name(cell.mode);
        c["policy"] = scene_policy_name(cell.policy);
        c["global_accuracy"] = cell.global_accuracy;
        c["pooled_accuracy"] = cell.pooled_accuracy;
        c["participants"] = cell.participants;
        c["scene_count"] = cell.scene_count;
        json folds = json::array();
        for (const SceneSubjectResult& r : cell.results) {
            folds.push_back(json{{"scene", scene_label(r.scene)},
                                 {"subject", r.subject},
                                 {"total", r.confusion.total()},
                                 {"correct", r.confusion.trace()},
                                 {"accuracy", r.accuracy}});
        }
        c["folds"] = std::move(folds);
        json scenes = json::array();
        for (const SceneReport& scene : cell.scenes) {
            json s;
            s["scene"] = scene_label(scene.scene);
            s["mean_accuracy"] = scene.mean_accuracy;
            json per_class = json::array();
            for (const ClassStat& stat : scene.per_class) per_class.push_back(class_stat_json(stat));
            s["per_class"] = std::move(per_class);
            scenes.push_back(std::move(s));
        }
        c["scenes"] = std::move(scenes);
        c["pooled_confusion"] = confusion_json(cell.pooled);
        cell_array.push_back(std::move(c));
    }
    doc["cells"] = std::move(cell_array);
    return doc.dump(2) + "\n";
}

}  // namespace har
