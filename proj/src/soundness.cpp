#include "wfnet/soundness.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <sstream>
#include <unordered_map>

namespace wfnet {

Marking::Marking(std::initializer_list<std::pair<const NodeId, Count>> tokens) {
  for (const auto& [place, count] : tokens) set(place, count);
}

Marking Marking::uniform(const std::vector<NodeId>& places, Count k) {
  Marking m;
  for (const auto& p : places) m.set(p, k);
  return m;
}

Marking::Count Marking::operator[](const NodeId& place) const {
  auto it = tokens_.find(place);
  return it == tokens_.end() ? 0 : it->second;
}

void Marking::set(const NodeId& place, Count count) {
  if (count == 0) {
    tokens_.erase(place);
  } else {
    tokens_[place] = count;
  }
}

std::uint64_t Marking::size() const noexcept {
  std::uint64_t total = 0;
  for (const auto& [place, count] : tokens_) total += count;
  return total;
}

Marking& Marking::operator+=(const Marking& other) {
  for (const auto& [place, count] : other.tokens_) tokens_[place] += count;
  return *this;
}

Marking& Marking::operator-=(const Marking& other) {
  if (!other.contained_in(*this))
    throw std::invalid_argument("bag difference of non-included markings");
  for (const auto& [place, count] : other.tokens_) set(place, (*this)[place] - count);
  return *this;
}

Marking operator*(Marking::Count k, const Marking& m) {
  Marking out;
  for (const auto& [place, count] : m.tokens_) out.set(place, k * count);
  return out;
}

bool Marking::contained_in(const Marking& other) const {
  return std::all_of(tokens_.begin(), tokens_.end(), [&](const auto& e) {
    return e.second <= other[e.first];
  });
}

std::string Marking::to_string() const {
  std::ostringstream os;
  os << '[';
  bool first = true;
  for (const auto& [place, count] : tokens_) {
    if (!first) os << ", ";
    first = false;
    os << place;
    if (count != 1) os << '^' << count;
  }
  os << ']';
  return os.str();
}

namespace {

void check_over_places(const WfNet& net, const Marking& m) {
  for (const auto& [place, count] : m.entries()) {
    auto n = net.find(place);
    if (!n || !net.is_place(*n))
      throw std::invalid_argument("marking references '" + place.str() +
                                  "', which is not a place of the net");
  }
}

bool is_enabled(const WfNet& net, const Marking& m, WfNet::Index t) {
  return std::all_of(net.pre(t).begin(), net.pre(t).end(),
                     [&](auto p) { return m[net.id(p)] >= 1; });
}

}  // namespace

std::vector<NodeId> enabled_transitions(const WfNet& net, const Marking& m) {
  check_over_places(net, m);
  std::vector<NodeId> out;
  for (WfNet::Index n = 0; n < net.size(); ++n)
    if (!net.is_place(n) && is_enabled(net, m, n)) out.push_back(net.id(n));
  return out;
}

Marking fire(const WfNet& net, const Marking& m, const NodeId& t) {
  check_over_places(net, m);
  const auto n = net.index_of(t);
  if (net.is_place(n)) throw std::invalid_argument("'" + t.str() + "' is not a transition");
  if (!is_enabled(net, m, n))
    throw std::invalid_argument("'" + t.str() + "' is not enabled at " + m.to_string());
  Marking out = m;
  for (auto p : net.pre(n)) out.set(net.id(p), out[net.id(p)] - 1);
  for (auto p : net.post(n)) out.set(net.id(p), out[net.id(p)] + 1);
  return out;
}

namespace {

using Dense = std::vector<Marking::Count>;

struct DenseHash {
  std::size_t operator()(const Dense& d) const noexcept {
    std::size_t h = 1469598103934665603ULL;
    for (auto c : d) {
      h ^= c;
      h *= 1099511628211ULL;
    }
    return h;
  }
};

// Explicit state space over dense markings (one slot per place).
class StateSpace {
 public:
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  explicit StateSpace(const WfNet& net) : net_(net), slot_(net.size(), npos) {
    for (WfNet::Index n = 0; n < net.size(); ++n) {
      if (net.is_place(n)) {
        slot_[n] = places_.size();
        places_.push_back(n);
      } else {
        transitions_.push_back(n);
      }
    }
  }

  Dense dense(const Marking& m) const {
    Dense d(places_.size(), 0);
    for (const auto& [place, count] : m.entries()) d[slot_[net_.index_of(place)]] = count;
    return d;
  }

  Marking sparse(const Dense& d) const {
    Marking m;
    for (std::size_t i = 0; i < d.size(); ++i)
      if (d[i]) m.set(net_.id(places_[i]), d[i]);
    return m;
  }

  Dense uniform(std::span<const WfNet::Index> nodes, Marking::Count k) const {
    Dense d(places_.size(), 0);
    for (auto n : nodes) d[slot_[n]] = k;
    return d;
  }

  // Breadth-first exploration from `sources` (deduplicated).
  void explore(const std::vector<Dense>& sources, const ExplorationBounds& bounds) {
    for (const auto& s : sources) discover(s, npos, 0);
    std::size_t next = 0;
    while (next < states_.size()) {
      const std::size_t id = next++;
      const std::uint64_t tokens =
          std::accumulate(states_[id].begin(), states_[id].end(), std::uint64_t{0});
      if (tokens > bounds.max_tokens) {
        over_tokens_.push_back(id);
        unexpanded_[id] = 1;
        if (!bound_hit_) bound_hit_ = "maxTokens";
        continue;
      }
      for (auto t : transitions_) {
        const Dense& cur = states_[id];
        bool enabled = true;
        for (auto p : net_.pre(t)) {
          if (cur[slot_[p]] == 0) {
            enabled = false;
            break;
          }
        }
        if (!enabled) continue;
        Dense succ = cur;
        for (auto p : net_.pre(t)) --succ[slot_[p]];
        for (auto p : net_.post(t)) ++succ[slot_[p]];
        auto it = index_.find(succ);
        std::size_t target;
        if (it != index_.end()) {
          target = it->second;
        } else if (states_.size() >= bounds.max_states) {
          // Cannot record the successor: this state stays partially expanded.
          unexpanded_[id] = 1;
          if (!bound_hit_) bound_hit_ = "maxStates";
          continue;
        } else {
          target = discover(std::move(succ), id, t);
        }
        edges_[id].push_back({t, target});
      }
    }
  }

  // States that can reach `target` or any state whose successors were not
  // all recorded. Everything else is definitely stuck.
  std::vector<char> may_reach(const Dense& target) const {
    std::vector<std::vector<std::size_t>> reverse(states_.size());
    for (std::size_t s = 0; s < states_.size(); ++s)
      for (const auto& e : edges_[s]) reverse[e.target].push_back(s);
    std::vector<char> seen(states_.size(), 0);
    std::deque<std::size_t> queue;
    auto push = [&](std::size_t s) {
      if (!seen[s]) {
        seen[s] = 1;
        queue.push_back(s);
      }
    };
    if (auto it = index_.find(target); it != index_.end()) push(it->second);
    for (std::size_t s = 0; s < states_.size(); ++s)
      if (unexpanded_[s]) push(s);
    while (!queue.empty()) {
      auto s = queue.front();
      queue.pop_front();
      for (auto r : reverse[s]) push(r);
    }
    return seen;
  }

  std::vector<NodeId> path_to(std::size_t s) const {
    std::vector<NodeId> seq;
    while (parent_[s] != npos) {
      seq.push_back(net_.id(via_[s]));
      s = parent_[s];
    }
    std::reverse(seq.begin(), seq.end());
    return seq;
  }

  std::size_t size() const { return states_.size(); }
  std::size_t find(const Dense& d) const {
    auto it = index_.find(d);
    return it == index_.end() ? npos : it->second;
  }
  const Dense& state(std::size_t s) const { return states_[s]; }
  bool complete() const { return !bound_hit_.has_value(); }
  const std::optional<std::string>& bound_hit() const { return bound_hit_; }
  const std::vector<std::size_t>& over_tokens() const { return over_tokens_; }
  const WfNet& net() const { return net_; }

  struct Edge {
    WfNet::Index transition;
    std::size_t target;
  };
  const std::vector<Edge>& edges(std::size_t s) const { return edges_[s]; }

 private:
  std::size_t discover(Dense d, std::size_t parent, WfNet::Index via) {
    auto [it, inserted] = index_.emplace(d, states_.size());
    if (!inserted) return it->second;
    states_.push_back(std::move(d));
    edges_.emplace_back();
    parent_.push_back(parent);
    via_.push_back(via);
    unexpanded_.push_back(0);
    return it->second;
  }

  const WfNet& net_;
  std::vector<std::size_t> slot_;
  std::vector<WfNet::Index> places_;
  std::vector<WfNet::Index> transitions_;
  std::vector<Dense> states_;
  std::vector<std::vector<Edge>> edges_;
  std::vector<std::size_t> parent_;
  std::vector<WfNet::Index> via_;
  std::vector<char> unexpanded_;
  std::vector<std::size_t> over_tokens_;
  std::unordered_map<Dense, std::size_t, DenseHash> index_;
  std::optional<std::string> bound_hit_;
};

bool dense_geq(const Dense& a, const Dense& b) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] < b[i]) return false;
  return true;
}

Dense dense_minus(Dense a, const Dense& b) {
  for (std::size_t i = 0; i < a.size(); ++i) a[i] -= b[i];
  return a;
}

void require_positive(Marking::Count k) {
  if (k == 0) throw std::invalid_argument("k must be at least 1");
}

}  // namespace

std::string_view to_string(Verdict v) noexcept {
  switch (v) {
    case Verdict::sound:
      return "sound";
    case Verdict::unsound:
      return "unsound";
    case Verdict::inconclusive:
      break;
  }
  return "inconclusive";
}

ReachabilityGraph explore_reachable(const WfNet& net, const Marking& initial,
                                    const ExplorationBounds& bounds) {
  if (bounds.max_states < 1 || bounds.max_tokens < 1)
    throw std::invalid_argument("exploration bounds must be at least 1");
  check_over_places(net, initial);
  StateSpace space(net);
  space.explore({space.dense(initial)}, bounds);
  ReachabilityGraph graph;
  graph.markings.reserve(space.size());
  for (std::size_t s = 0; s < space.size(); ++s) {
    graph.markings.push_back(space.sparse(space.state(s)));
    auto& out = graph.edges.emplace_back();
    for (const auto& e : space.edges(s)) out.push_back({net.id(e.transition), e.target});
  }
  graph.over_token_bound = space.over_tokens();
  graph.complete = space.complete();
  graph.bound_hit = space.bound_hit();
  return graph;
}

WfNet soundness_subject(const WfNet& net) {
  return net.io_type() == IoType::transition ? place_completion(net) : net;
}

namespace {

SoundnessVerdict k_sound_on(const WfNet& subject, Marking::Count k,
                            const ExplorationBounds& bounds) {
  StateSpace space(subject);
  const Dense start = space.uniform(subject.inputs(), k);
  const Dense target = space.uniform(subject.outputs(), k);
  space.explore({start}, bounds);
  SoundnessVerdict verdict;
  verdict.states_explored = space.size();
  const auto ok = space.may_reach(target);
  for (std::size_t s = 0; s < space.size(); ++s) {
    if (ok[s]) continue;
    Witness w;
    w.firing_sequence = space.path_to(s);
    w.reached = space.sparse(space.state(s));
    w.stuck = w.reached;
    verdict.status = Verdict::unsound;
    verdict.witness = std::move(w);
    return verdict;
  }
  if (space.complete()) {
    verdict.status = Verdict::sound;
  } else {
    verdict.status = Verdict::inconclusive;
    verdict.bound_hit = space.bound_hit();
  }
  return verdict;
}

}  // namespace

SoundnessVerdict check_k_sound(const WfNet& net, Marking::Count k,
                               const ExplorationBounds& bounds) {
  require_positive(k);
  return k_sound_on(soundness_subject(net), k, bounds);
}

StarSoundnessReport check_star_sound_bounded(const WfNet& net, Marking::Count max_k,
                                             const ExplorationBounds& bounds) {
  require_positive(max_k);
  const WfNet subject = soundness_subject(net);
  StarSoundnessReport report;
  bool inconclusive = false;
  for (Marking::Count k = 1; k <= max_k; ++k) {
    auto v = k_sound_on(subject, k, bounds);
    const auto status = v.status;
    report.per_k.emplace_back(k, std::move(v));
    if (status == Verdict::unsound) {
      report.summary = Verdict::unsound;
      report.first_unsound = k;
      return report;
    }
    inconclusive = inconclusive || status == Verdict::inconclusive;
  }
  report.summary = inconclusive ? Verdict::inconclusive : Verdict::sound;
  return report;
}

SoundnessVerdict check_substitution_sound_bounded(const WfNet& net, Marking::Count k,
                                                  const ExplorationBounds& bounds) {
  require_positive(k);
  const WfNet subject = soundness_subject(net);
  StateSpace main(subject);
  main.explore({main.uniform(subject.inputs(), k)}, bounds);

  SoundnessVerdict verdict;
  verdict.states_explored = main.size();
  std::optional<std::string> bound_hit = main.bound_hit();

  std::optional<std::pair<std::size_t, Marking::Count>> best;  // (main state, k')
  for (Marking::Count removed = 0; removed <= k; ++removed) {
    const Dense removed_outputs = main.uniform(subject.outputs(), removed);
    std::vector<Dense> starts;
    std::vector<std::size_t> origin;
    for (std::size_t s = 0; s < main.size(); ++s) {
      if (!dense_geq(main.state(s), removed_outputs)) continue;
      starts.push_back(dense_minus(main.state(s), removed_outputs));
      origin.push_back(s);
    }
    if (starts.empty()) continue;
    StateSpace sub(subject);
    sub.explore(starts, bounds);
    verdict.states_explored += sub.size();
    if (!bound_hit) bound_hit = sub.bound_hit();
    const auto ok = sub.may_reach(main.uniform(subject.outputs(), k - removed));
    for (std::size_t i = 0; i < starts.size(); ++i) {
      const std::size_t sid = sub.find(starts[i]);
      if (sid == StateSpace::npos || ok[sid]) continue;
      if (!best || origin[i] < best->first) best = {origin[i], removed};
      break;  // origins are increasing; the first stuck start is the shortest
    }
  }
  if (best) {
    Witness w;
    w.firing_sequence = main.path_to(best->first);
    w.reached = main.sparse(main.state(best->first));
    w.removed_output_sets = best->second;
    w.stuck = w.reached - best->second * Marking::uniform(subject.output_ids(), 1);
    verdict.status = Verdict::unsound;
    verdict.witness = std::move(w);
    return verdict;
  }
  if (bound_hit) {
    verdict.status = Verdict::inconclusive;
    verdict.bound_hit = bound_hit;
  } else {
    verdict.status = Verdict::sound;
  }
  return verdict;
}

}  // namespace wfnet
