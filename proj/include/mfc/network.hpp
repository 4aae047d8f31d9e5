#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace mfc {

enum class NodeKind { kInput, kHidden, kOutput };

struct Node {
  std::string id;
  NodeKind kind = NodeKind::kHidden;

  bool operator==(const Node&) const = default;
};

/// Directed connection carrying synaptic weight `weight` (0-based).
struct Edge {
  std::size_t from = 0;
  std::size_t to = 0;
  std::size_t weight = 0;

  bool operator==(const Edge&) const = default;
};

/// Feedforward tanh network without biases. Every non-input node outputs
/// tanh of the weighted sum of its enabled incoming edges. Each weight index
/// belongs to exactly one edge, so masking a weight removes that edge.
class FeedforwardNet {
 public:
  /// Validates the graph: at least one input, exactly one output, acyclic,
  /// inputs have no incoming edges, weight indices 0..q-1 each used once.
  /// Throws InvalidTopology otherwise. Weights start at 0, all enabled.
  FeedforwardNet(std::vector<Node> nodes, std::vector<Edge> edges, double w_max = 1.0);

  /// Two inputs, two hidden nodes, one output, seven weights:
  /// W1 x1->h1, W2 x2->h1, W3 x1->h2, W4 x2->h2, W5 h1->y, W6 h2->y, W7 x1->y.
  static FeedforwardNet default_topology();

  double forward(std::span<const double> x) const;

  /// Stores value clamped to [-w_max, w_max].
  void set_weight(std::size_t index, double value);
  void set_mask(std::size_t index, bool enabled);
  void set_weights(std::span<const double> values);

  double weight(std::size_t index) const;
  bool enabled(std::size_t index) const;
  const std::vector<double>& weights() const noexcept { return weights_; }
  const std::vector<bool>& mask() const noexcept { return mask_; }

  std::size_t weight_count() const noexcept { return weights_.size(); }
  std::size_t input_count() const noexcept { return input_nodes_.size(); }
  std::size_t node_count() const noexcept { return nodes_.size(); }
  double w_max() const noexcept { return w_max_; }

  const std::vector<Node>& nodes() const noexcept { return nodes_; }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  std::size_t node_index(const std::string& id) const;

  bool operator==(const FeedforwardNet& other) const;

 private:
  void check_index(std::size_t index) const;

  std::vector<Node> nodes_;
  std::vector<Edge> edges_;
  std::vector<double> weights_;
  std::vector<bool> mask_;
  double w_max_;

  std::vector<std::size_t> order_;        // topological order of non-input nodes
  std::vector<std::size_t> input_nodes_;  // node indices, in declaration order
  std::size_t output_node_ = 0;
  std::vector<std::vector<std::size_t>> incoming_;  // edge indices per node
};

}  // namespace mfc
