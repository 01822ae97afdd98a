#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "wfnet/net.hpp"

namespace wfnet {

/// A bag of tokens over places. Zero counts are not stored, so two markings
/// with the same nonzero entries compare equal.
class Marking {
 public:
  using Count = std::uint32_t;

  Marking() = default;
  Marking(std::initializer_list<std::pair<const NodeId, Count>> tokens);

  /// k tokens on every id in `places`; this is k.I / k.O.
  static Marking uniform(const std::vector<NodeId>& places, Count k);

  Count operator[](const NodeId& place) const;
  void set(const NodeId& place, Count count);
  const std::map<NodeId, Count>& entries() const noexcept { return tokens_; }
  /// Total number of tokens, |m|.
  std::uint64_t size() const noexcept;
  bool empty() const noexcept { return tokens_.empty(); }

  Marking& operator+=(const Marking& other);
  /// Throws std::invalid_argument unless *this >= other.
  Marking& operator-=(const Marking& other);
  friend Marking operator+(Marking a, const Marking& b) { return a += b; }
  friend Marking operator-(Marking a, const Marking& b) { return a -= b; }
  friend Marking operator*(Count k, const Marking& m);

  /// Bag inclusion (pointwise <=). Not a total order.
  bool contained_in(const Marking& other) const;
  friend bool operator<=(const Marking& a, const Marking& b) { return a.contained_in(b); }
  friend bool operator>=(const Marking& a, const Marking& b) { return b.contained_in(a); }
  friend bool operator==(const Marking&, const Marking&) = default;

  std::string to_string() const;

 private:
  std::map<NodeId, Count> tokens_;
};

/// Transitions t with bag(preset(t)) <= m, in id order.
/// Throws std::invalid_argument if m names something that is not a place.
std::vector<NodeId> enabled_transitions(const WfNet& net, const Marking& m);

/// m - preset(t) + postset(t). Throws std::invalid_argument if t is not an
/// enabled transition.
Marking fire(const WfNet& net, const Marking& m, const NodeId& t);

struct ExplorationBounds {
  std::size_t max_states = 100'000;
  std::size_t max_tokens = 64;
};

struct ReachabilityGraph {
  struct Edge {
    NodeId transition;
    std::size_t target;
  };
  /// markings[0] is the initial marking; order is breadth-first.
  std::vector<Marking> markings;
  std::vector<std::vector<Edge>> edges;
  /// Markings above max_tokens; present but never expanded.
  std::vector<std::size_t> over_token_bound;
  bool complete = true;
  std::optional<std::string> bound_hit;
};

ReachabilityGraph explore_reachable(const WfNet& net, const Marking& initial,
                                    const ExplorationBounds& bounds = {});

enum class Verdict { sound, unsound, inconclusive };

std::string_view to_string(Verdict v) noexcept;

/// A firing sequence from k.I (on the place completion for tWF nets) to
/// `reached`; `stuck` = reached - removed_output_sets.O cannot reach the
/// required final marking.
struct Witness {
  std::vector<NodeId> firing_sequence;
  Marking reached;
  Marking::Count removed_output_sets = 0;
  Marking stuck;
};

struct SoundnessVerdict {
  Verdict status = Verdict::inconclusive;
  std::optional<Witness> witness;       // iff unsound
  std::size_t states_explored = 0;
  std::optional<std::string> bound_hit;  // iff inconclusive
};

/// The pWF net the soundness checks run on: the net itself, or its place
/// completion for tWF nets.
WfNet soundness_subject(const WfNet& net);

/// Throws std::invalid_argument for k == 0.
SoundnessVerdict check_k_sound(const WfNet& net, Marking::Count k,
                               const ExplorationBounds& bounds = {});

struct StarSoundnessReport {
  std::vector<std::pair<Marking::Count, SoundnessVerdict>> per_k;
  /// sound: sound for every k up to max_k; unsound: at `first_unsound`.
  Verdict summary = Verdict::inconclusive;
  std::optional<Marking::Count> first_unsound;
};

/// k-soundness for k = 1..max_k, stopping at the first unsound k. Never a
/// claim about unbounded *-soundness.
StarSoundnessReport check_star_sound_bounded(const WfNet& net, Marking::Count max_k,
                                             const ExplorationBounds& bounds = {});

/// Throws std::invalid_argument for k == 0.
SoundnessVerdict check_substitution_sound_bounded(const WfNet& net, Marking::Count k,
                                                  const ExplorationBounds& bounds = {});

}  // namespace wfnet
