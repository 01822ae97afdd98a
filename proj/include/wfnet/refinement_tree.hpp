#pragma once

#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "wfnet/node_id.hpp"

namespace wfnet {

/// The four seed classes of the AND-OR substitution closure.
enum class BasicClass { pand, tand11, por11, tor };

std::string_view to_string(BasicClass c) noexcept;
/// Parses "pAND", "11tAND", "11pOR" or "tOR"; throws std::invalid_argument.
BasicClass basic_class_from_string(std::string_view name);

using ClassSet = std::set<BasicClass>;

/// Leaf: an original node (no classes, no children). Internal: the node a
/// basic-class subnet was contracted into (or substituted at), with one
/// child per member of that subnet.
struct RefinementTree {
  NodeId node;
  ClassSet classes;
  std::vector<RefinementTree> children;

  bool is_leaf() const noexcept { return children.empty(); }
  std::size_t leaf_count() const;
  /// Edges on the longest root-to-leaf path; 0 for a leaf.
  std::size_t depth() const;
  /// Smallest leaf id below this node; the canonical sort key.
  const NodeId& first_leaf() const;
  std::vector<NodeId> leaves() const;

  /// Sorts children (recursively) by first leaf id.
  void canonicalize();

  friend bool operator==(const RefinementTree&, const RefinementTree&) = default;
};

}  // namespace wfnet
