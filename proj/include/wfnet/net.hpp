#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "wfnet/node_id.hpp"

namespace wfnet {

/// Raised for operations on node ids that are not part of a net.
class UnknownNodeError : public std::invalid_argument {
 public:
  explicit UnknownNodeError(const NodeId& id)
      : std::invalid_argument("unknown node id '" + id.str() + "'") {}
};

struct PetriGraph {
  std::set<NodeId> places;
  std::set<NodeId> transitions;
  std::set<Arc> arcs;
};

/// Unvalidated I/O net as read from a document. `warnings` carries
/// non-fatal observations from the reader (e.g. deduplicated arcs).
struct IoNet {
  PetriGraph graph;
  std::set<NodeId> inputs;
  std::set<NodeId> outputs;
  std::vector<std::string> warnings;
};

/// Every violated WF-net property, with offending ids per category.
struct ValidationReport {
  std::vector<NodeId> invalid_ids;
  std::vector<NodeId> place_and_transition;
  std::vector<Arc> dangling_arcs;
  std::vector<Arc> non_bipartite_arcs;
  std::vector<NodeId> unknown_interface_nodes;
  bool empty_inputs = false;
  bool empty_outputs = false;
  /// Interface nodes whose kind disagrees with the majority of I ∪ O.
  std::vector<NodeId> io_inconsistent;
  /// Nodes not reachable from any input node.
  std::vector<NodeId> unreachable;
  /// Nodes from which no output node is reachable.
  std::vector<NodeId> dead_ends;
  std::vector<std::string> warnings;

  bool ok() const noexcept;
  std::string to_string() const;
};

struct ValidationResult;

/// A validated workflow net. Immutable; nodes are indexed in ascending id
/// order, so two nets with the same nodes, arcs and interface compare equal
/// ("node-identical") regardless of how they were built.
class WfNet {
 public:
  using Index = std::uint32_t;

  std::size_t size() const noexcept { return ids_.size(); }
  std::size_t place_count() const noexcept { return place_count_; }
  std::size_t transition_count() const noexcept { return size() - place_count_; }
  std::size_t arc_count() const noexcept { return arc_count_; }
  IoType io_type() const noexcept { return io_type_; }

  const NodeId& id(Index n) const { return ids_[n]; }
  NodeKind kind(Index n) const { return kinds_[n]; }
  bool is_place(Index n) const { return kinds_[n] == NodeKind::place; }
  bool is_input(Index n) const { return is_input_[n] != 0; }
  bool is_output(Index n) const { return is_output_[n] != 0; }
  std::span<const Index> pre(Index n) const { return pre_[n]; }
  std::span<const Index> post(Index n) const { return post_[n]; }
  bool has_arc(Index from, Index to) const {
    return std::binary_search(post_[from].begin(), post_[from].end(), to);
  }
  std::span<const Index> inputs() const { return inputs_; }
  std::span<const Index> outputs() const { return outputs_; }

  bool contains(const NodeId& id) const { return index_.count(id) != 0; }
  std::optional<Index> find(const NodeId& id) const;
  /// Throws UnknownNodeError.
  Index index_of(const NodeId& id) const;

  std::vector<NodeId> node_ids() const { return ids_; }
  std::vector<NodeId> places() const;
  std::vector<NodeId> transitions() const;
  std::vector<NodeId> input_ids() const;
  std::vector<NodeId> output_ids() const;
  std::vector<Arc> arcs() const;  // sorted
  IoNet to_io_net() const;

  friend bool operator==(const WfNet& a, const WfNet& b);

 private:
  friend ValidationResult validate(const IoNet& candidate);
  WfNet() = default;

  std::vector<NodeId> ids_;
  std::vector<NodeKind> kinds_;
  std::vector<std::vector<Index>> pre_;
  std::vector<std::vector<Index>> post_;
  std::vector<char> is_input_;
  std::vector<char> is_output_;
  std::vector<Index> inputs_;
  std::vector<Index> outputs_;
  std::unordered_map<NodeId, Index> index_;
  std::size_t place_count_ = 0;
  std::size_t arc_count_ = 0;
  IoType io_type_ = IoType::place;
};

struct ValidationResult {
  std::optional<WfNet> net;  // present iff report.ok()
  ValidationReport report;
};

/// Checks the WF-net conditions. Never returns both a net and violations.
ValidationResult validate(const IoNet& candidate);

/// Like validate, but throws std::invalid_argument with the report text.
WfNet validate_or_throw(const IoNet& candidate);

/// Accumulates nodes and arcs by id and validates on build().
class NetBuilder {
 public:
  NetBuilder& place(NodeId id);
  NetBuilder& transition(NodeId id);
  NetBuilder& arc(NodeId source, NodeId target);
  NetBuilder& input(NodeId id);
  NetBuilder& output(NodeId id);

  const IoNet& io_net() const noexcept { return net_; }
  /// Throws std::invalid_argument if the accumulated net is not a WF net.
  WfNet build() const;

 private:
  IoNet net_;
};

std::vector<NodeId> preset(const WfNet& net, const NodeId& n);
std::vector<NodeId> postset(const WfNet& net, const NodeId& n);

/// Single-node paths count, so reachable(net, n, n) is always true.
bool reachable(const WfNet& net, const NodeId& from, const NodeId& to);
bool is_acyclic(const WfNet& net);

/// Adds p_i feeding every input transition and p_o fed by every output
/// transition. Throws std::invalid_argument for pWF nets.
WfNet place_completion(const WfNet& net);
/// Adds t_i feeding every input place and t_o fed by every output place.
/// Throws std::invalid_argument for tWF nets.
WfNet transition_completion(const WfNet& net);

/// `base` if unused in `net`, else the first of base_1, base_2, ... that is.
NodeId fresh_id(const WfNet& net, const std::string& base);

namespace detail {

/// Forward (or backward) closure from `seeds`, as a membership bitmap.
std::vector<char> closure(const WfNet& net, std::span<const WfNet::Index> seeds,
                          bool forward);

}  // namespace detail

}  // namespace wfnet
