#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "har/eval.hpp"

namespace har {

// All report emitters format numbers deterministically (percentages with
// two decimals), so identical inputs give byte-identical files.

std::string format_percent(double fraction);

// Comparison grid: one row per preconditioning mode, one column per method,
// cells are global accuracies in percent.
std::string render_grid_csv(const std::vector<AggregateReport>& cells);

// One row per (scene, subject) fold result.
std::string render_results_csv(const std::vector<AggregateReport>& cells);

// Per-scene report for one cell: per-activity precision and recall as
// mean +/- sample stddev across subjects, with per-scene average rows and a
// recomputed global average.
std::string render_scene_csv(const AggregateReport& cell);

// Pooled confusion matrix as a labelled CSV grid.
std::string render_confusion_csv(const ConfusionMatrix& matrix);

// Simple heatmap of the pooled confusion matrix (row-normalized).
std::string render_confusion_svg(const ConfusionMatrix& matrix);

// JSON mirror of everything above.
std::string render_report_json(const std::vector<AggregateReport>& cells);

}  // namespace har
