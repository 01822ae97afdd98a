#include "wfnet/refinement_tree.hpp"

#include <algorithm>
#include <stdexcept>

namespace wfnet {

std::string_view to_string(BasicClass c) noexcept {
  switch (c) {
    case BasicClass::pand:
      return "pAND";
    case BasicClass::tand11:
      return "11tAND";
    case BasicClass::por11:
      return "11pOR";
    case BasicClass::tor:
      break;
  }
  return "tOR";
}

BasicClass basic_class_from_string(std::string_view name) {
  for (auto c : {BasicClass::pand, BasicClass::tand11, BasicClass::por11, BasicClass::tor})
    if (to_string(c) == name) return c;
  throw std::invalid_argument("unknown basic class '" + std::string(name) + "'");
}

std::size_t RefinementTree::leaf_count() const {
  if (is_leaf()) return 1;
  std::size_t total = 0;
  for (const auto& c : children) total += c.leaf_count();
  return total;
}

std::size_t RefinementTree::depth() const {
  std::size_t d = 0;
  for (const auto& c : children) d = std::max(d, c.depth() + 1);
  return d;
}

const NodeId& RefinementTree::first_leaf() const {
  if (is_leaf()) return node;
  const NodeId* best = &children.front().first_leaf();
  for (const auto& c : children) {
    const NodeId& f = c.first_leaf();
    if (f < *best) best = &f;
  }
  return *best;
}

std::vector<NodeId> RefinementTree::leaves() const {
  std::vector<NodeId> out;
  std::vector<const RefinementTree*> stack{this};
  while (!stack.empty()) {
    const auto* t = stack.back();
    stack.pop_back();
    if (t->is_leaf()) out.push_back(t->node);
    for (const auto& c : t->children) stack.push_back(&c);
  }
  std::sort(out.begin(), out.end());
  return out;
}

void RefinementTree::canonicalize() {
  for (auto& c : children) c.canonicalize();
  std::sort(children.begin(), children.end(),
            [](const RefinementTree& a, const RefinementTree& b) {
              return a.first_leaf() < b.first_leaf();
            });
}

}  // namespace wfnet
