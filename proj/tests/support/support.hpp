#pragma once

// Shared helpers for the test binaries: fixture access, small random nets and
// brute-force oracles written straight from the definitions. The oracles use
// only the public node/arc accessors of the library, never its algorithms.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "wfnet/andor.hpp"
#include "wfnet/net.hpp"
#include "wfnet/refinement_tree.hpp"
#include "wfnet/soundness.hpp"

namespace wfnet::testing {

std::string data_dir();
WfNet fixture(const std::string& name);
/// Names (without extension) of every .net file in the data directory.
std::vector<std::string> fixture_names();

/// A net as bitmasks over at most 32 nodes.
struct SmallNet {
  std::vector<std::string> names;
  std::vector<bool> is_place;
  std::vector<std::uint32_t> pre, post;
  std::uint32_t inputs = 0, outputs = 0;

  std::size_t size() const { return names.size(); }
  std::uint32_t all() const { return size() == 32 ? ~0u : (1u << size()) - 1; }
  int index(const std::string& name) const;
  std::string key() const;
};

SmallNet small_net(const WfNet& net);
std::uint32_t mask_of(const SmallNet& net, const std::vector<NodeId>& ids);

/// Basic classes of M[S] if S is a well-nested WF subnet of a basic class.
std::optional<ClassSet> oracle_contractible(const SmallNet& net, std::uint32_t s);
bool oracle_well_nested(const SmallNet& net, std::uint32_t s);
/// (I_S, O_S) of the restriction.
std::pair<std::uint32_t, std::uint32_t> oracle_interface(const SmallNet& net, std::uint32_t s);
SmallNet oracle_contract(const SmallNet& net, std::uint32_t s, const std::string& fresh);
/// Every non-trivial contractible selection.
std::vector<std::uint32_t> oracle_all_contractible(const SmallNet& net);

/// Exhaustive search over all contraction sequences of non-trivial
/// contractible subnets: true iff some sequence ends in a single node.
class AndOrOracle {
 public:
  bool is_and_or(const SmallNet& net);

 private:
  std::map<std::string, bool> memo_;
};

/// Breadth-first reachability over the arc list (single-node paths count).
bool oracle_reachable(const WfNet& net, const NodeId& from, const NodeId& to);

/// A valid WF net with at most `max_nodes` nodes: an AND-OR net, a perturbed
/// AND-OR net or a random bipartite net, depending on `flavor` (0, 1, 2).
WfNet random_small_net(Rng& rng, std::size_t max_nodes, int flavor);

/// Replays a witness from k.I on the soundness subject; returns the marking
/// reached, or nullopt if some step is not enabled.
std::optional<Marking> replay(const WfNet& subject, Marking::Count k,
                              const std::vector<NodeId>& sequence);

/// Node ids with `suffix` appended.
WfNet renamed(const WfNet& net, const std::string& suffix);

}  // namespace wfnet::testing
