#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include <json.hpp>

#include "har/common.hpp"

namespace har {

struct GasNode {
    int id = -1;
    Vec weight;
    double habituation = 1.0;        // in [h_min, h0]
    double accumulated_error = 0.0;  // GNG only
    long win_count = 0;
};

struct GasEdge {
    int a = -1;  // a < b
    int b = -1;
    int age = 0;
};

struct GwrParams {
    double activation_threshold = 0.995;  // a_T: insert when activation falls below
    std::size_t max_nodes = 1000;
    int epochs = 10;
    double eps_b = 0.2;
    double eps_n = 0.006;
    int max_edge_age = 50;
    double h0 = 1.0;
    double alpha_b = 0.95;
    double alpha_n = 0.95;
    double tau_b = 3.33;
    double tau_n = 14.3;
    double firing_threshold = 0.1;  // h_T: insert only once the winner is well trained
    double h_min = 0.001;
    // Outlier gate: samples whose activation falls more than outlier_gamma
    // standard deviations below the running mean are skipped entirely.
    double outlier_gamma = 4.0;
    bool outlier_gating = true;
    long gate_warmup = 100;  // samples before the gate becomes active

    void validate() const;
};

struct GngParams {
    long insertion_interval = 3;  // insert every this many steps
    double eps_b = 0.2;
    double eps_n = 0.006;
    int max_edge_age = 1;
    double error_decay = 0.995;
    double split_error_scale = 0.5;  // error reduction applied at insertion
    std::size_t max_nodes = 1000;
    int epochs = 10;

    void validate() const;
};

class GasGraph {
public:
    explicit GasGraph(std::size_t dimension) : dimension_(dimension) {}

    std::size_t dimension() const { return dimension_; }
    std::size_t node_count() const { return nodes_.size(); }
    const std::vector<GasNode>& nodes() const { return nodes_; }
    const std::vector<GasEdge>& edges() const { return edges_; }

    int add_node(Vec weight, double habituation);
    void remove_node(int id);
    const GasNode& node(int id) const;
    GasNode& node(int id);
    bool has_node(int id) const;

    // Sets the edge's age to 0, creating it if absent.
    void refresh_edge(int a, int b);
    void remove_edge(int a, int b);
    bool has_edge(int a, int b) const;
    std::vector<int> neighbours(int id) const;
    void age_edges_of(int id);

    // Removes edges older than max_age, then isolated nodes. At least two
    // nodes always survive.
    void prune(int max_age);

    void scale_errors(double factor);

    // Replaces the graph contents wholesale (deserialization). Node ids must
    // be unique; edges must reference existing nodes.
    void restore(std::vector<GasNode> nodes, std::vector<GasEdge> edges);

private:
    std::size_t index_of(int id) const;

    std::size_t dimension_;
    std::vector<GasNode> nodes_;  // ascending id order
    std::vector<GasEdge> edges_;
    int next_id_ = 0;
};

struct BestTwo {
    int best = -1;
    int second = -1;
    double best_distance = 0.0;
};

// Two nearest nodes by Euclidean distance; ties resolved toward the
// smaller node id. Requires at least two nodes.
BestTwo find_best_two(const GasGraph& graph, const Vec& x);

// Nearest node and its distance. Requires a non-empty graph.
std::pair<int, double> quantize(const GasGraph& graph, const Vec& x);

// Mean distance from each sample to its nearest node.
double quantization_error(const GasGraph& graph, const std::vector<Vec>& data);

// Running mean/standard deviation of activations (Welford).
struct ActivationStats {
    long count = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double value);
    double stddev() const;
};

struct StepReport {
    int best = -1;
    int second = -1;
    double activation = 0.0;
    bool skipped = false;   // rejected by the outlier gate
    bool inserted = false;
    int new_node = -1;
};

StepReport gwr_step(GasGraph& graph, const Vec& x, const GwrParams& params, ActivationStats& stats);
StepReport gng_step(GasGraph& graph, const Vec& x, const GngParams& params, long step_number);

// Both trainers seed the graph with two distinct samples, then run
// `epochs` shuffled passes over the data. Deterministic in (data, params,
// seed). Per-epoch mean quantization error is appended to *epoch_qe when
// given.
GasGraph gwr_train(const std::vector<Vec>& data, const GwrParams& params, std::uint64_t seed,
                   std::vector<double>* epoch_qe = nullptr);
GasGraph gng_train(const std::vector<Vec>& data, const GngParams& params, std::uint64_t seed,
                   std::vector<double>* epoch_qe = nullptr);

// JSON checkpoint format: {dimension, engine, params, nodes, edges}.
nlohmann::json gas_to_json(const GasGraph& graph, const std::string& engine, const nlohmann::json& params);
nlohmann::json gwr_params_to_json(const GwrParams& params);
nlohmann::json gng_params_to_json(const GngParams& params);
GwrParams gwr_params_from_json(const nlohmann::json& doc);
GngParams gng_params_from_json(const nlohmann::json& doc);
GasGraph gas_from_json(const nlohmann::json& doc);

}  // namespace har
