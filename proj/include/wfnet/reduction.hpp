#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "wfnet/andor.hpp"
#include "wfnet/net.hpp"
#include "wfnet/refinement_tree.hpp"

namespace wfnet {

/// A nonempty set of node ids of some host net.
using SubnetSelection = std::set<NodeId>;

/// The restriction M[S]: nodes and arcs inside S; inputs are the members that
/// are inputs of M or have an arc entering from outside S, outputs dually.
struct SubnetView {
  IoNet restriction;
  bool io_consistent = false;
  /// The view as a WF net; present iff io_consistent.
  std::optional<WfNet> net;
};

/// Throws std::invalid_argument for an empty selection or UnknownNodeError.
SubnetView subnet_view(const WfNet& net, const SubnetSelection& s);

/// All inputs of M[S] share their presets from outside S and their membership
/// in the inputs of M; all outputs dually.
bool is_well_nested(const WfNet& net, const SubnetSelection& s);

/// Replaces S by the single node `fresh`, whose kind is the I/O type of M[S].
/// Throws std::invalid_argument if M[S] is not I/O consistent or `fresh`
/// already names a node outside S.
WfNet contract(const WfNet& net, const SubnetSelection& s, const NodeId& fresh);

struct ContractibleSubnet {
  SubnetSelection members;
  ClassSet classes;
};

/// The basic classes of M[S] if S is well-nested and M[S] is a WF net of at
/// least one basic AND-OR class; nullopt otherwise. Checked directly from
/// the definitions.
std::optional<ClassSet> contractible_classes(const WfNet& net, const SubnetSelection& s);

/// Grows a candidate subnet with input i and output o, pruning the possible
/// basic classes as it goes. Present only for a well-nested subnet of a basic
/// class that has i among its inputs and o among its outputs.
/// Throws std::invalid_argument when i == o, the kinds differ, or o is not
/// reachable from i.
std::optional<ContractibleSubnet> expand(const WfNet& net, const NodeId& i, const NodeId& o);

/// Order in which candidate nodes (and node pairs) are scanned. Any order
/// yields the same reduction up to isomorphism.
struct OrderPolicy {
  enum class Mode { lexicographic, reverse_lexicographic, shuffled };
  Mode mode = Mode::lexicographic;
  std::uint64_t seed = 0;

  static OrderPolicy lexicographic() { return {}; }
  static OrderPolicy reverse() { return {Mode::reverse_lexicographic, 0}; }
  static OrderPolicy shuffled(std::uint64_t seed) { return {Mode::shuffled, seed}; }
  std::string to_string() const;
};

enum class ContractionRule { loop, parallel, expand };

std::string_view to_string(ContractionRule rule) noexcept;

struct FoundSubnet {
  ContractibleSubnet subnet;
  ContractionRule rule;
};

/// First hit of the loop test, then the parallel test, then expand over
/// reachable same-kind pairs, each scanned in policy order. Absent iff the net
/// has no contractible subnet with more than one node.
std::optional<FoundSubnet> find_contractible(const WfNet& net,
                                             const OrderPolicy& policy = {});

struct ContractionEvent {
  const WfNet& before;
  const WfNet& after;
  const FoundSubnet& found;
  const NodeId& fresh;
};

struct ReduceOptions {
  OrderPolicy policy;
  /// Called after every contraction.
  std::function<void(const ContractionEvent&)> on_contraction;
};

struct ReduceResult {
  WfNet net;
  /// One tree per node of `net`, sorted by first leaf id.
  std::vector<RefinementTree> trees;
  std::size_t contractions = 0;
};

/// Contracts non-trivial contractible subnets until none is left. Fresh nodes
/// are named ctr_1, ctr_2, ... skipping any id seen during the run.
ReduceResult reduce(const WfNet& net, const ReduceOptions& options = {});

/// True iff the net reduces to a single node.
bool is_and_or(const WfNet& net);

/// For every pair (u, v) of nodes of `before` with v reachable from u, the
/// images of u and v (members of S map to `fresh`) are connected in `after`.
/// Throws std::invalid_argument unless after == contract(before, s, fresh).
bool path_quotient_check(const WfNet& before, const WfNet& after, const SubnetSelection& s,
                         const NodeId& fresh);

/// How two contractible selections relate.
enum class OverlapCase {
  disjoint,                     // no shared nodes (connected or not)
  overlapping_different_types,  // shared nodes, neither contains the other
  overlapping_same_type,
  nested,                       // one contains the other
};

std::string_view to_string(OverlapCase c) noexcept;

struct CommutationResult {
  OverlapCase overlap = OverlapCase::disjoint;
  std::optional<WfNet> first_then_second;
  std::optional<WfNet> second_then_first;
  /// Empty when both orders succeeded and gave node-identical nets.
  std::string failure;

  bool commutes() const noexcept { return failure.empty(); }
};

/// Contracts s1 and s2 in both orders using the residual rule for their
/// overlap case and compares the results node for node:
///  - disjoint: contract the other selection as is (into n1 / n2);
///  - different types: contract the remainder of the other selection;
///  - same type: contract the remainder plus the new node, into n3;
///  - nested (s2 ⊆ s1): contract s1 directly into n1, versus s2 into n2 then
///    the remainder of s1 plus n2 into n1.
/// Every contraction performed must be of a contractible subnet.
CommutationResult check_commutation(const WfNet& net, const SubnetSelection& s1,
                                    const SubnetSelection& s2, const NodeId& n1,
                                    const NodeId& n2, const NodeId& n3);

}  // namespace wfnet
