#include "mfc/network.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <string>
#include <utility>

#include "mfc/errors.hpp"

namespace mfc {

FeedforwardNet::FeedforwardNet(std::vector<Node> nodes, std::vector<Edge> edges, double w_max)
    : nodes_(std::move(nodes)), edges_(std::move(edges)), w_max_(w_max) {
  if (!(std::isfinite(w_max_) && w_max_ > 0.0)) throw InvalidTopology("w_max must be positive");

  const std::size_t n = nodes_.size();
  std::size_t outputs = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (nodes_[i].kind == NodeKind::kInput) input_nodes_.push_back(i);
    if (nodes_[i].kind == NodeKind::kOutput) {
      output_node_ = i;
      ++outputs;
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (nodes_[j].id == nodes_[i].id) throw InvalidTopology("duplicate node id '" + nodes_[i].id + "'");
    }
  }
  if (input_nodes_.empty()) throw InvalidTopology("network needs at least one input node");
  if (outputs != 1) throw InvalidTopology("network needs exactly one output node");

  const std::size_t q = edges_.size();
  std::vector<bool> seen(q, false);
  incoming_.assign(n, {});
  std::vector<std::size_t> indegree(n, 0);
  for (std::size_t e = 0; e < q; ++e) {
    const Edge& edge = edges_[e];
    if (edge.from >= n || edge.to >= n) throw InvalidTopology("edge references an unknown node");
    if (nodes_[edge.to].kind == NodeKind::kInput) {
      throw InvalidTopology("edge into input node '" + nodes_[edge.to].id + "'");
    }
    if (nodes_[edge.from].kind == NodeKind::kOutput) {
      throw InvalidTopology("edge out of output node '" + nodes_[edge.from].id + "'");
    }
    if (edge.weight >= q || seen[edge.weight]) {
      throw InvalidTopology("weight indices must be 0..q-1, each used by exactly one edge");
    }
    seen[edge.weight] = true;
    incoming_[edge.to].push_back(e);
    ++indegree[edge.to];
  }

  // Kahn's algorithm; declaration order breaks ties so the order is stable.
  std::vector<std::vector<std::size_t>> outgoing(n);
  for (const Edge& edge : edges_) outgoing[edge.from].push_back(edge.to);
  std::queue<std::size_t> ready;
  for (std::size_t i = 0; i < n; ++i) {
    if (indegree[i] == 0) ready.push(i);
  }
  std::size_t visited = 0;
  while (!ready.empty()) {
    const std::size_t v = ready.front();
    ready.pop();
    ++visited;
    if (nodes_[v].kind != NodeKind::kInput) order_.push_back(v);
    for (std::size_t w : outgoing[v]) {
      if (--indegree[w] == 0) ready.push(w);
    }
  }
  if (visited != n) throw InvalidTopology("network graph contains a cycle");

  weights_.assign(q, 0.0);
  mask_.assign(q, true);
}

FeedforwardNet FeedforwardNet::default_topology() {
  std::vector<Node> nodes = {{"x1", NodeKind::kInput},
                             {"x2", NodeKind::kInput},
                             {"h1", NodeKind::kHidden},
                             {"h2", NodeKind::kHidden},
                             {"y", NodeKind::kOutput}};
  std::vector<Edge> edges = {{0, 2, 0}, {1, 2, 1}, {0, 3, 2}, {1, 3, 3},
                             {2, 4, 4}, {3, 4, 5}, {0, 4, 6}};
  return FeedforwardNet(std::move(nodes), std::move(edges), 1.0);
}

double FeedforwardNet::forward(std::span<const double> x) const {
  if (x.size() != input_nodes_.size()) {
    throw DimensionMismatch("network expects " + std::to_string(input_nodes_.size()) +
                            " inputs, got " + std::to_string(x.size()));
  }
  std::vector<double> value(nodes_.size(), 0.0);
  for (std::size_t i = 0; i < input_nodes_.size(); ++i) value[input_nodes_[i]] = x[i];
  for (std::size_t v : order_) {
    double sum = 0.0;
    for (std::size_t e : incoming_[v]) {
      const Edge& edge = edges_[e];
      if (mask_[edge.weight]) sum += weights_[edge.weight] * value[edge.from];
    }
    value[v] = std::tanh(sum);
  }
  return value[output_node_];
}

void FeedforwardNet::check_index(std::size_t index) const {
  if (index >= weights_.size()) {
    throw IndexOutOfRange("weight index " + std::to_string(index) + " out of range (q = " +
                          std::to_string(weights_.size()) + ")");
  }
}

void FeedforwardNet::set_weight(std::size_t index, double value) {
  check_index(index);
  weights_[index] = std::clamp(value, -w_max_, w_max_);
}

void FeedforwardNet::set_mask(std::size_t index, bool enabled) {
  check_index(index);
  mask_[index] = enabled;
}

void FeedforwardNet::set_weights(std::span<const double> values) {
  if (values.size() != weights_.size()) throw DimensionMismatch("weight vector has the wrong length");
  for (std::size_t i = 0; i < values.size(); ++i) set_weight(i, values[i]);
}

double FeedforwardNet::weight(std::size_t index) const {
  check_index(index);
  return weights_[index];
}

bool FeedforwardNet::enabled(std::size_t index) const {
  check_index(index);
  return mask_[index];
}

std::size_t FeedforwardNet::node_index(const std::string& id) const {
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].id == id) return i;
  }
  throw IndexOutOfRange("unknown node id '" + id + "'");
}

bool FeedforwardNet::operator==(const FeedforwardNet& other) const {
  return nodes_ == other.nodes_ && edges_ == other.edges_ && weights_ == other.weights_ &&
         mask_ == other.mask_ && w_max_ == other.w_max_;
}

}  // namespace mfc
