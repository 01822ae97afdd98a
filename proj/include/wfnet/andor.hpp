#pragma once

#include <cstdint>
#include <random>
#include <string>

#include "wfnet/net.hpp"
#include "wfnet/refinement_tree.hpp"

namespace wfnet {

/// Every place has exactly one producer and one consumer, where being an
/// input (output) node stands in for the producer (consumer).
bool has_and_property(const WfNet& net);
/// Dual of the AND property, over transitions.
bool has_or_property(const WfNet& net);

struct ClassLabel {
  bool and_property = false;
  bool or_property = false;
  bool acyclic = false;
  bool one_input = false;
  bool one_output = false;
  IoType io_type = IoType::place;

  bool is_pand() const noexcept { return and_property && acyclic && io_type == IoType::place; }
  bool is_tand() const noexcept {
    return and_property && acyclic && io_type == IoType::transition;
  }
  bool is_por() const noexcept { return or_property && io_type == IoType::place; }
  bool is_tor() const noexcept { return or_property && io_type == IoType::transition; }

  /// The basic AND-OR classes this label satisfies (possibly several).
  ClassSet basic_classes() const;
  bool basic_and_or() const { return !basic_classes().empty(); }

  std::string to_string() const;
  friend bool operator==(const ClassLabel&, const ClassLabel&) = default;
};

ClassLabel classify(const WfNet& net);

/// Replaces node `n` of `host` by `inner`: every input of `inner` inherits
/// the preset of n, every output inherits its postset, and n's interface
/// membership passes to inner's inputs/outputs.
/// Throws UnknownNodeError, or std::invalid_argument on id collisions or when
/// inner's I/O type differs from n's kind.
WfNet substitute(const WfNet& host, const NodeId& n, const WfNet& inner);

/// Deterministic source of randomness for the generators. Draws are defined
/// in terms of the raw 64-bit mt19937 stream so a seed fixes the output on
/// every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  /// Uniform in [0, bound); bound must be positive.
  std::uint64_t below(std::uint64_t bound) { return engine_() % bound; }
  bool chance(unsigned percent) { return below(100) < percent; }

 private:
  std::mt19937_64 engine_;
};

/// Source of globally fresh ids ("<prefix><counter>").
class IdSource {
 public:
  explicit IdSource(std::string prefix = "n") : prefix_(std::move(prefix)) {}
  NodeId next_place() { return NodeId("p" + prefix_ + std::to_string(counter_++)); }
  NodeId next_transition() { return NodeId("t" + prefix_ + std::to_string(counter_++)); }

 private:
  std::string prefix_;
  std::uint64_t counter_ = 0;
};

/// A random net of the given basic class with at most `budget` nodes
/// (budget >= 1). The result always classifies as `kind`.
WfNet generate_basic_net(BasicClass kind, std::size_t budget, Rng& rng, IdSource& ids);
WfNet generate_basic_net(BasicClass kind, std::size_t budget, std::uint64_t seed);

struct GenerationRecipe {
  std::uint64_t seed = 1;
  std::size_t substitution_steps = 0;
  std::size_t max_basic_net_nodes = 4;
  IoType root_io_type = IoType::place;
};

struct GeneratedNet {
  WfNet net;
  /// Exact generation history; leaves are exactly the nodes of `net`.
  RefinementTree tree;
};

/// A random AND-OR net: a basic net of the root I/O type, then
/// `substitution_steps` substitutions of uniformly chosen nodes by fresh
/// basic nets of matching I/O type.
GeneratedNet generate_and_or_net(const GenerationRecipe& recipe);

}  // namespace wfnet
