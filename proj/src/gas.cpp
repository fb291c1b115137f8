#include "har/gas.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

namespace har {

using json = nlohmann::json;

void GwrParams::validate() const {
    if (!(eps_n > 0.0 && eps_n <= eps_b && eps_b < 1.0))
        throw ConfigError("gwr: need 0 < eps_n <= eps_b < 1");
    if (!(activation_threshold > 0.0 && activation_threshold <= 1.0))
        throw ConfigError("gwr: activation threshold must be in (0,1]");
    if (!(tau_b > 0.0 && tau_n > 0.0)) throw ConfigError("gwr: tau values must be positive");
    if (outlier_gamma < 0.0) throw ConfigError("gwr: outlier gamma must be >= 0");
    if (max_nodes < 2) throw ConfigError("gwr: max_nodes must be >= 2");
    if (epochs < 1) throw ConfigError("gwr: epochs must be >= 1");
    if (!(h_min > 0.0 && h_min < h0)) throw ConfigError("gwr: need 0 < h_min < h0");
}

void GngParams::validate() const {
    if (insertion_interval < 1) throw ConfigError("gng: insertion interval must be >= 1");
    if (!(error_decay > 0.0 && error_decay < 1.0)) throw ConfigError("gng: error decay must be in (0,1)");
    if (!(eps_n > 0.0 && eps_b > 0.0 && eps_b < 1.0)) throw ConfigError("gng: bad learning rates");
    if (max_nodes < 2) throw ConfigError("gng: max_nodes must be >= 2");
    if (epochs < 1) throw ConfigError("gng: epochs must be >= 1");
}

// --- GasGraph ------------------------------------------------------------------

std::size_t GasGraph::index_of(int id) const {
    const auto it = std::lower_bound(nodes_.begin(), nodes_.end(), id,
                                     [](const GasNode& n, int key) { return n.id < key; });
    if (it == nodes_.end() || it->id != id) throw Error("gas: unknown node id " + std::to_string(id));
    return static_cast<std::size_t>(it - nodes_.begin());
}

int GasGraph::add_node(Vec weight, double habituation) {
    if (weight.size() != dimension_)
        throw DimensionMismatch("gas: node weight has dimension " + std::to_string(weight.size()) +
                                ", graph expects " + std::to_string(dimension_));
    GasNode node;
    node.id = next_id_++;
    node.weight = std::move(weight);
    node.habituation = habituation;
    nodes_.push_back(std::move(node));
    return nodes_.back().id;
}

void GasGraph::remove_node(int id) {
    const std::size_t idx = index_of(id);
    nodes_.erase(nodes_.begin() + static_cast<std::ptrdiff_t>(idx));
    std::erase_if(edges_, [id](const GasEdge& e) { return e.a == id || e.b == id; });
}

const GasNode& GasGraph::node(int id) const {
    return nodes_[index_of(id)];
}

GasNode& GasGraph::node(int id) {
    return nodes_[index_of(id)];
}

bool GasGraph::has_node(int id) const {
    const auto it = std::lower_bound(nodes_.begin(), nodes_.end(), id,
                                     [](const GasNode& n, int key) { return n.id < key; });
    return it != nodes_.end() && it->id == id;
}

void GasGraph::refresh_edge(int a, int b) {
    if (a == b) throw Error("gas: self edge");
    if (a > b) std::swap(a, b);
    for (GasEdge& e : edges_) {
        if (e.a == a && e.b == b) {
            e.age = 0;
            return;
        }
    }
    index_of(a);
    index_of(b);
    edges_.push_back(GasEdge{a, b, 0});
}

void GasGraph::remove_edge(int a, int b) {
    if (a > b) std::swap(a, b);
    std::erase_if(edges_, [a, b](const GasEdge& e) { return e.a == a && e.b == b; });
}

bool GasGraph::has_edge(int a, int b) const {
    if (a > b) std::swap(a, b);
    return std::any_of(edges_.begin(), edges_.end(),
                       [a, b](const GasEdge& e) { return e.a == a && e.b == b; });
}

std::vector<int> GasGraph::neighbours(int id) const {
    std::vector<int> out;
    for (const GasEdge& e : edges_) {
        if (e.a == id) out.push_back(e.b);
        else if (e.b == id) out.push_back(e.a);
    }
    std::sort(out.begin(), out.end());
    return out;
}

void GasGraph::age_edges_of(int id) {
    for (GasEdge& e : edges_) {
        if (e.a == id || e.b == id) ++e.age;
    }
}

void GasGraph::scale_errors(double factor) {
    for (GasNode& n : nodes_) n.accumulated_error *= factor;
}

void GasGraph::restore(std::vector<GasNode> nodes, std::vector<GasEdge> edges) {
    std::sort(nodes.begin(), nodes.end(), [](const GasNode& a, const GasNode& b) { return a.id < b.id; });
    int max_id = -1;
    for (const GasNode& n : nodes) {
        if (n.id <= max_id) throw Error("gas restore: duplicate or negative node id");
        if (n.weight.size() != dimension_) throw DimensionMismatch("gas restore: node dimension mismatch");
        max_id = n.id;
    }
    nodes_ = std::move(nodes);
    next_id_ = max_id + 1;
    edges_.clear();
    for (GasEdge e : edges) {
        if (e.a > e.b) std::swap(e.a, e.b);
        index_of(e.a);
        index_of(e.b);
        if (e.a == e.b) throw Error("gas restore: self edge");
        edges_.push_back(e);
    }
}

void GasGraph::prune(int max_age) {
    std::erase_if(edges_, [max_age](const GasEdge& e) { return e.age > max_age; });
    if (nodes_.size() <= 2) return;
    std::vector<int> degree_ids;
    degree_ids.reserve(edges_.size() * 2);
    for (const GasEdge& e : edges_) {
        degree_ids.push_back(e.a);
        degree_ids.push_back(e.b);
    }
    std::sort(degree_ids.begin(), degree_ids.end());
    // Remove isolated nodes in ascending id order, but never drop below two.
    std::vector<int> isolated;
    for (const GasNode& n : nodes_) {
        if (!std::binary_search(degree_ids.begin(), degree_ids.end(), n.id)) isolated.push_back(n.id);
    }
    for (int id : isolated) {
        if (nodes_.size() <= 2) break;
        remove_node(id);
    }
}

// --- matching -------------------------------------------------------------------

BestTwo find_best_two(const GasGraph& graph, const Vec& x) {
    if (graph.node_count() < 2) throw DataError("find_best_two: graph has fewer than 2 nodes");
    if (x.size() != graph.dimension())
        throw DimensionMismatch("find_best_two: query dimension " + std::to_string(x.size()) +
                                ", graph dimension " + std::to_string(graph.dimension()));
    BestTwo out;
    double best_d2 = std::numeric_limits<double>::infinity();
    double second_d2 = std::numeric_limits<double>::infinity();
    for (const GasNode& n : graph.nodes()) {
        const double d2 = squared_distance_bounded(n.weight, x, second_d2);
        // Strict comparisons keep the smallest id on ties (nodes are in
        // ascending id order).
        if (d2 < best_d2) {
            second_d2 = best_d2;
            out.second = out.best;
            best_d2 = d2;
            out.best = n.id;
        } else if (d2 < second_d2) {
            second_d2 = d2;
            out.second = n.id;
        }
    }
    out.best_distance = std::sqrt(best_d2);
    return out;
}

std::pair<int, double> quantize(const GasGraph& graph, const Vec& x) {
    if (graph.node_count() == 0) throw DataError("quantize: empty graph");
    if (x.size() != graph.dimension())
        throw DimensionMismatch("quantize: query dimension " + std::to_string(x.size()) +
                                ", graph dimension " + std::to_string(graph.dimension()));
    int best = -1;
    double best_d2 = std::numeric_limits<double>::infinity();
    for (const GasNode& n : graph.nodes()) {
        const double d2 = squared_distance_bounded(n.weight, x, best_d2);
        if (d2 < best_d2) {
            best_d2 = d2;
            best = n.id;
        }
    }
    return {best, std::sqrt(best_d2)};
}

double quantization_error(const GasGraph& graph, const std::vector<Vec>& data) {
    if (data.empty()) throw DataError("quantization_error: no data");
    double sum = 0.0;
    for (const Vec& x : data) sum += quantize(graph, x).second;
    return sum / static_cast<double>(data.size());
}

// --- GWR -----------------------------------------------------------------------

void ActivationStats::add(double value) {
    ++count;
    const double delta = value - mean;
    mean += delta / static_cast<double>(count);
    m2 += delta * (value - mean);
}

double ActivationStats::stddev() const {
    if (count < 2) return 0.0;
    return std::sqrt(m2 / static_cast<double>(count));
}

namespace {

// Discrete habituation update h += (alpha*(h0 - h) - 1)/tau, clamped into
// [h_min, h0].
void habituate(GasNode& node, double alpha, double tau, double h0, double h_min) {
    double h = node.habituation + (alpha * (h0 - node.habituation) - 1.0) / tau;
    node.habituation = std::clamp(h, h_min, h0);
}

}  // namespace

StepReport gwr_step(GasGraph& graph, const Vec& x, const GwrParams& params, ActivationStats& stats) {
    StepReport report;
    const BestTwo match = find_best_two(graph, x);
    report.best = match.best;
    report.second = match.second;

    graph.refresh_edge(match.best, match.second);

    const double activation = std::exp(-match.best_distance);
    report.activation = activation;

    if (params.outlier_gating && stats.count >= params.gate_warmup &&
        activation < stats.mean - params.outlier_gamma * stats.stddev()) {
        report.skipped = true;
        return report;
    }

    GasNode& best = graph.node(match.best);
    ++best.win_count;

    const bool insert = activation < params.activation_threshold &&
                        best.habituation < params.firing_threshold &&
                        graph.node_count() < params.max_nodes;
    if (insert) {
        Vec midpoint(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) midpoint[i] = 0.5 * (best.weight[i] + x[i]);
        const int fresh = graph.add_node(std::move(midpoint), params.h0);
        graph.refresh_edge(fresh, match.best);
        graph.refresh_edge(fresh, match.second);
        graph.remove_edge(match.best, match.second);
        report.inserted = true;
        report.new_node = fresh;
    } else {
        GasNode& b = graph.node(match.best);
        for (std::size_t i = 0; i < x.size(); ++i)
            b.weight[i] += params.eps_b * b.habituation * (x[i] - b.weight[i]);
        for (int nid : graph.neighbours(match.best)) {
            GasNode& n = graph.node(nid);
            for (std::size_t i = 0; i < x.size(); ++i)
                n.weight[i] += params.eps_n * n.habituation * (x[i] - n.weight[i]);
        }
    }

    graph.age_edges_of(match.best);
    habituate(graph.node(match.best), params.alpha_b, params.tau_b, params.h0, params.h_min);
    for (int nid : graph.neighbours(match.best))
        habituate(graph.node(nid), params.alpha_n, params.tau_n, params.h0, params.h_min);

    graph.prune(params.max_edge_age);
    stats.add(activation);

    if (graph.node_count() > params.max_nodes) throw Error("gwr: node budget exceeded");
    return report;
}

// --- GNG -----------------------------------------------------------------------

StepReport gng_step(GasGraph& graph, const Vec& x, const GngParams& params, long step_number) {
    StepReport report;
    const BestTwo match = find_best_two(graph, x);
    report.best = match.best;
    report.second = match.second;

    graph.age_edges_of(match.best);

    GasNode& best = graph.node(match.best);
    best.accumulated_error += match.best_distance * match.best_distance;
    ++best.win_count;
    for (std::size_t i = 0; i < x.size(); ++i) best.weight[i] += params.eps_b * (x[i] - best.weight[i]);
    for (int nid : graph.neighbours(match.best)) {
        GasNode& n = graph.node(nid);
        for (std::size_t i = 0; i < x.size(); ++i) n.weight[i] += params.eps_n * (x[i] - n.weight[i]);
    }

    graph.refresh_edge(match.best, match.second);
    graph.prune(params.max_edge_age);

    if (step_number % params.insertion_interval == 0 && graph.node_count() < params.max_nodes) {
        // Insert halfway between the node with the largest accumulated error
        // and that node's worst neighbour.
        const GasNode* q = nullptr;
        for (const GasNode& n : graph.nodes()) {
            if (!q || n.accumulated_error > q->accumulated_error) q = &n;
        }
        const GasNode* f = nullptr;
        for (int nid : graph.neighbours(q->id)) {
            const GasNode& n = graph.node(nid);
            if (!f || n.accumulated_error > f->accumulated_error) f = &n;
        }
        if (f) {
            const int q_id = q->id;
            const int f_id = f->id;
            Vec midpoint(graph.dimension());
            for (std::size_t i = 0; i < midpoint.size(); ++i)
                midpoint[i] = 0.5 * (q->weight[i] + f->weight[i]);
            const int fresh = graph.add_node(std::move(midpoint), 1.0);
            graph.refresh_edge(fresh, q_id);
            graph.refresh_edge(fresh, f_id);
            graph.remove_edge(q_id, f_id);
            graph.node(q_id).accumulated_error *= params.split_error_scale;
            graph.node(f_id).accumulated_error *= params.split_error_scale;
            graph.node(fresh).accumulated_error = graph.node(q_id).accumulated_error;
            report.inserted = true;
            report.new_node = fresh;
        }
    }

    graph.scale_errors(params.error_decay);

    if (graph.node_count() > params.max_nodes) throw Error("gng: node budget exceeded");
    return report;
}

// --- trainers --------------------------------------------------------------------

namespace {

std::pair<std::size_t, std::size_t> pick_two_distinct(const std::vector<Vec>& data, Rng& rng) {
    const std::size_t first = static_cast<std::size_t>(rng.below(data.size()));
    for (int attempt = 0; attempt < 64; ++attempt) {
        const std::size_t second = static_cast<std::size_t>(rng.below(data.size()));
        if (data[second] != data[first]) return {first, second};
    }
    // Fall back to scanning; the data may be nearly constant.
    for (std::size_t i = 0; i < data.size(); ++i) {
        if (data[i] != data[first]) return {first, i};
    }
    throw DataError("gas training data contains no two distinct samples");
}

void check_dimensions(const std::vector<Vec>& data) {
    if (data.size() < 2) throw DataError("gas training needs at least 2 samples");
    const std::size_t dim = data[0].size();
    for (const Vec& v : data) {
        if (v.size() != dim) throw DimensionMismatch("gas training data has inconsistent dimensions");
    }
}

std::vector<std::size_t> shuffled_order(std::size_t n, Rng& rng) {
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    rng.shuffle(order);
    return order;
}

}  // namespace

GasGraph gwr_train(const std::vector<Vec>& data, const GwrParams& params, std::uint64_t seed,
                   std::vector<double>* epoch_qe) {
    params.validate();
    check_dimensions(data);
    Rng rng(mix_seed(seed, 0x6777));
    const auto [i0, i1] = pick_two_distinct(data, rng);
    GasGraph graph(data[0].size());
    graph.add_node(data[i0], params.h0);
    graph.add_node(data[i1], params.h0);
    ActivationStats stats;
    for (int epoch = 0; epoch < params.epochs; ++epoch) {
        const auto order = shuffled_order(data.size(), rng);
        for (std::size_t idx : order) gwr_step(graph, data[idx], params, stats);
        if (epoch_qe) epoch_qe->push_back(quantization_error(graph, data));
    }
    return graph;
}

GasGraph gng_train(const std::vector<Vec>& data, const GngParams& params, std::uint64_t seed,
                   std::vector<double>* epoch_qe) {
    params.validate();
    check_dimensions(data);
    Rng rng(mix_seed(seed, 0x676e));
    const auto [i0, i1] = pick_two_distinct(data, rng);
    GasGraph graph(data[0].size());
    graph.add_node(data[i0], 1.0);
    graph.add_node(data[i1], 1.0);
    long step = 0;
    for (int epoch = 0; epoch < params.epochs; ++epoch) {
        const auto order = shuffled_order(data.size(), rng);
        for (std::size_t idx : order) gng_step(graph, data[idx], params, ++step);
        if (epoch_qe) epoch_qe->push_back(quantization_error(graph, data));
    }
    return graph;
}

// --- serialization ----------------------------------------------------------------

json gwr_params_to_json(const GwrParams& p) {
    return json{{"activation_threshold", p.activation_threshold},
                {"max_nodes", p.max_nodes},
                {"epochs", p.epochs},
                {"eps_b", p.eps_b},
                {"eps_n", p.eps_n},
                {"max_edge_age", p.max_edge_age},
                {"h0", p.h0},
                {"alpha_b", p.alpha_b},
                {"alpha_n", p.alpha_n},
                {"tau_b", p.tau_b},
                {"tau_n", p.tau_n},
                {"firing_threshold", p.firing_threshold},
                {"h_min", p.h_min},
                {"outlier_gamma", p.outlier_gamma},
                {"outlier_gating", p.outlier_gating},
                {"gate_warmup", p.gate_warmup}};
}

json gng_params_to_json(const GngParams& p) {
    return json{{"insertion_interval", p.insertion_interval},
                {"eps_b", p.eps_b},
                {"eps_n", p.eps_n},
                {"max_edge_age", p.max_edge_age},
                {"error_decay", p.error_decay},
                {"split_error_scale", p.split_error_scale},
                {"max_nodes", p.max_nodes},
                {"epochs", p.epochs}};
}

GwrParams gwr_params_from_json(const json& doc) {
    GwrParams p;
    p.activation_threshold = doc.at("activation_threshold").get<double>();
    p.max_nodes = doc.at("max_nodes").get<std::size_t>();
    p.epochs = doc.at("epochs").get<int>();
    p.eps_b = doc.at("eps_b").get<double>();
    p.eps_n = doc.at("eps_n").get<double>();
    p.max_edge_age = doc.at("max_edge_age").get<int>();
    p.h0 = doc.at("h0").get<double>();
    p.alpha_b = doc.at("alpha_b").get<double>();
    p.alpha_n = doc.at("alpha_n").get<double>();
    p.tau_b = doc.at("tau_b").get<double>();
    p.tau_n = doc.at("tau_n").get<double>();
    p.firing_threshold = doc.at("firing_threshold").get<double>();
    p.h_min = doc.at("h_min").get<double>();
    p.outlier_gamma = doc.at("outlier_gamma").get<double>();
    p.outlier_gating = doc.at("outlier_gating").get<bool>();
    p.gate_warmup = doc.at("gate_warmup").get<long>();
    return p;
}

GngParams gng_params_from_json(const json& doc) {
    GngParams p;
    p.insertion_interval = doc.at("insertion_interval").get<long>();
    p.eps_b = doc.at("eps_b").get<double>();
    p.eps_n = doc.at("eps_n").get<double>();
    p.max_edge_age = doc.at("max_edge_age").get<int>();
    p.error_decay = doc.at("error_decay").get<double>();
    p.split_error_scale = doc.at("split_error_scale").get<double>();
    p.max_nodes = doc.at("max_nodes").get<std::size_t>();
    p.epochs = doc.at("epochs").get<int>();
    return p;
}

json gas_to_json(const GasGraph& graph, const std::string& engine, const json& params) {
    json nodes = json::array();
    for (const GasNode& n : graph.nodes()) {
        nodes.push_back(json{{"id", n.id},
                             {"weight", n.weight},
                             {"h", n.habituation},
                             {"error", n.accumulated_error},
                             {"wins", n.win_count}});
    }
    json edges = json::array();
    for (const GasEdge& e : graph.edges()) edges.push_back(json{{"a", e.a}, {"b", e.b}, {"age", e.age}});
    return json{{"dimension", graph.dimension()},
                {"engine", engine},
                {"params", params},
                {"nodes", std::move(nodes)},
                {"edges", std::move(edges)}};
}

GasGraph gas_from_json(const json& doc) {
    GasGraph graph(doc.at("dimension").get<std::size_t>());
    std::vector<GasNode> nodes;
    for (const json& n : doc.at("nodes")) {
        GasNode node;
        node.id = n.at("id").get<int>();
        node.weight = n.at("weight").get<Vec>();
        node.habituation = n.at("h").get<double>();
        node.accumulated_error = n.value("error", 0.0);
        node.win_count = n.value("wins", 0L);
        nodes.push_back(std::move(node));
    }
    std::vector<GasEdge> edges;
    for (const json& e : doc.at("edges"))
        edges.push_back(GasEdge{e.at("a").get<int>(), e.at("b").get<int>(), e.at("age").get<int>()});
    graph.restore(std::move(nodes), std::move(edges));
    return graph;
}

}  // namespace har
