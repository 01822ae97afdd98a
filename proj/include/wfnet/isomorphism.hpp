#pragma once

#include <map>
#include <optional>

#include "wfnet/net.hpp"

namespace wfnet {

using IsoMapping = std::map<NodeId, NodeId>;

/// A bijection between the nodes of `a` and `b` preserving node kind, input
/// and output membership and arcs in both directions, if one exists.
std::optional<IsoMapping> isomorphic(const WfNet& a, const WfNet& b);

}  // namespace wfnet
