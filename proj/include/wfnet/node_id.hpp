#pragma once

#include <compare>
#include <cstddef>
#include <functional>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>

namespace wfnet {

/// Identity of a place or transition. Ids are case-sensitive tokens over
/// [A-Za-z0-9_]; ordering is plain byte-wise string order.
class NodeId {
 public:
  NodeId() = default;
  NodeId(std::string value) : value_(std::move(value)) {}
  NodeId(const char* value) : value_(value) {}
  NodeId(std::string_view value) : value_(value) {}

  const std::string& str() const noexcept { return value_; }
  bool empty() const noexcept { return value_.empty(); }

  friend auto operator<=>(const NodeId&, const NodeId&) = default;
  friend bool operator==(const NodeId&, const NodeId&) = default;

 private:
  std::string value_;
};

inline std::ostream& operator<<(std::ostream& os, const NodeId& id) {
  return os << id.str();
}

/// True iff `text` is a nonempty token over [A-Za-z0-9_].
bool is_valid_node_id(std::string_view text) noexcept;

enum class NodeKind : unsigned char { place, transition };

/// The I/O type of a WF net is the kind of its interface nodes.
using IoType = NodeKind;

std::string_view to_string(NodeKind kind) noexcept;

struct Arc {
  NodeId source;
  NodeId target;

  friend auto operator<=>(const Arc&, const Arc&) = default;
  friend bool operator==(const Arc&, const Arc&) = default;
};

}  // namespace wfnet

template <>
struct std::hash<wfnet::NodeId> {
  std::size_t operator()(const wfnet::NodeId& id) const noexcept {
    return std::hash<std::string>{}(id.str());
  }
};
