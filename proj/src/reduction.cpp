#include "wfnet/reduction.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <stdexcept>
#include <unordered_map>

namespace wfnet {

namespace {

using Index = WfNet::Index;

// Reusable membership marks; clear() is O(1).
class Marks {
 public:
  explicit Marks(std::size_t n) : stamp_(n, 0) {}
  void clear() {
    if (++gen_ == 0) {
      std::fill(stamp_.begin(), stamp_.end(), 0);
      gen_ = 1;
    }
  }
  void set(Index n) { stamp_[n] = gen_; }
  void reset(Index n) { stamp_[n] = 0; }
  bool test(Index n) const { return stamp_[n] == gen_; }

 private:
  std::vector<std::uint32_t> stamp_;
  std::uint32_t gen_ = 1;
};

struct Workspace {
  explicit Workspace(std::size_t n) : in_s(n), is_in(n), is_out(n), seen(n) {}
  Marks in_s, is_in, is_out, seen;
};

bool same_span(std::span<const Index> a, std::span<const Index> b) {
  return std::equal(a.begin(), a.end(), b.begin(), b.end());
}

std::vector<Index> outside(std::span<const Index> nodes, const Marks& in_s) {
  std::vector<Index> out;
  for (auto n : nodes)
    if (!in_s.test(n)) out.push_back(n);
  return out;
}

std::size_t count_inside(std::span<const Index> nodes, const Marks& in_s) {
  return static_cast<std::size_t>(
      std::count_if(nodes.begin(), nodes.end(), [&](Index n) { return in_s.test(n); }));
}

bool restriction_acyclic(const WfNet& net, const std::vector<Index>& members, const Marks& in_s) {
  std::unordered_map<Index, std::size_t> indegree;
  std::vector<Index> ready;
  for (auto m : members) {
    const auto d = count_inside(net.pre(m), in_s);
    indegree[m] = d;
    if (d == 0) ready.push_back(m);
  }
  std::size_t visited = 0;
  while (!ready.empty()) {
    auto n = ready.back();
    ready.pop_back();
    ++visited;
    for (auto m : net.post(n))
      if (in_s.test(m) && --indegree[m] == 0) ready.push_back(m);
  }
  return visited == members.size();
}

// Contractibility straight from the definitions. `ws.in_s` must mark exactly
// `members`; ws.is_in / ws.is_out are overwritten with the interface of M[S].
std::optional<ClassSet> classes_of(const WfNet& net, const std::vector<Index>& members,
                                   Workspace& ws) {
  ws.is_in.clear();
  ws.is_out.clear();
  std::vector<Index> inputs, outputs;
  for (auto m : members) {
    if (net.is_input(m) || count_inside(net.pre(m), ws.in_s) < net.pre(m).size()) {
      ws.is_in.set(m);
      inputs.push_back(m);
    }
    if (net.is_output(m) || count_inside(net.post(m), ws.in_s) < net.post(m).size()) {
      ws.is_out.set(m);
      outputs.push_back(m);
    }
  }
  if (inputs.empty() || outputs.empty()) return std::nullopt;
  const NodeKind type = net.kind(inputs.front());
  for (auto n : inputs)
    if (net.kind(n) != type) return std::nullopt;
  for (auto n : outputs)
    if (net.kind(n) != type) return std::nullopt;

  const auto ext_pre = outside(net.pre(inputs.front()), ws.in_s);
  for (auto n : inputs) {
    if (net.is_input(n) != net.is_input(inputs.front())) return std::nullopt;
    if (outside(net.pre(n), ws.in_s) != ext_pre) return std::nullopt;
  }
  const auto ext_post = outside(net.post(outputs.front()), ws.in_s);
  for (auto n : outputs) {
    if (net.is_output(n) != net.is_output(outputs.front())) return std::nullopt;
    if (outside(net.post(n), ws.in_s) != ext_post) return std::nullopt;
  }

  ClassLabel label;
  label.io_type = type;
  label.one_input = inputs.size() == 1;
  label.one_output = outputs.size() == 1;
  label.and_property = true;
  label.or_property = true;
  for (auto m : members) {
    const bool ok = (ws.is_in.test(m) ? count_inside(net.pre(m), ws.in_s) == 0
                                      : count_inside(net.pre(m), ws.in_s) == 1) &&
                    (ws.is_out.test(m) ? count_inside(net.post(m), ws.in_s) == 0
                                       : count_inside(net.post(m), ws.in_s) == 1);
    if (!ok) (net.is_place(m) ? label.and_property : label.or_property) = false;
  }
  label.acyclic = label.and_property && restriction_acyclic(net, members, ws.in_s);
  auto classes = label.basic_classes();
  if (classes.empty()) return std::nullopt;
  return classes;
}

std::optional<ClassSet> classes_of(const WfNet& net, const std::vector<Index>& members) {
  Workspace ws(net.size());
  ws.in_s.clear();
  for (auto m : members) ws.in_s.set(m);
  return classes_of(net, members, ws);
}

std::vector<Index> indices_of(const WfNet& net, const SubnetSelection& s) {
  if (s.empty()) throw std::invalid_argument("subnet selection must be nonempty");
  std::vector<Index> out;
  out.reserve(s.size());
  for (const auto& id : s) out.push_back(net.index_of(id));
  std::sort(out.begin(), out.end());
  return out;
}

SubnetSelection selection_of(const WfNet& net, const std::vector<Index>& members) {
  SubnetSelection s;
  for (auto m : members) s.insert(net.id(m));
  return s;
}

WfNet contract_members(const WfNet& net, const std::vector<Index>& members,
                       const NodeId& fresh) {
  std::vector<char> in_s(net.size(), 0);
  for (auto m : members) in_s[m] = 1;
  std::optional<NodeKind> type;
  bool any_input = false, any_output = false;
  auto note_iface = [&](Index m) {
    if (type && *type != net.kind(m))
      throw std::invalid_argument("cannot contract: subnet is not I/O consistent");
    type = net.kind(m);
  };
  for (auto m : members) {
    bool entry = net.is_input(m), exit = net.is_output(m);
    for (auto p : net.pre(m)) entry = entry || !in_s[p];
    for (auto q : net.post(m)) exit = exit || !in_s[q];
    if (entry || exit) note_iface(m);
    any_input = any_input || net.is_input(m);
    any_output = any_output || net.is_output(m);
  }
  if (auto existing = net.find(fresh); existing && !in_s[*existing])
    throw std::invalid_argument("fresh id '" + fresh.str() + "' is already in use");

  IoNet io;
  for (Index n = 0; n < net.size(); ++n) {
    if (in_s[n]) continue;
    (net.is_place(n) ? io.graph.places : io.graph.transitions).insert(net.id(n));
    if (net.is_input(n)) io.inputs.insert(net.id(n));
    if (net.is_output(n)) io.outputs.insert(net.id(n));
    for (auto m : net.post(n)) io.graph.arcs.insert({net.id(n), in_s[m] ? fresh : net.id(m)});
  }
  for (auto m : members)
    for (auto q : net.post(m))
      if (!in_s[q]) io.graph.arcs.insert({fresh, net.id(q)});
  (*type == NodeKind::place ? io.graph.places : io.graph.transitions).insert(fresh);
  if (any_input) io.inputs.insert(fresh);
  if (any_output) io.outputs.insert(fresh);
  return validate_or_throw(io);
}

// Algorithm "expand": grow from i (input) and o (output) while tracking the
// still-possible basic classes, then confirm the final candidate against the
// definitions.
std::optional<std::pair<std::vector<Index>, ClassSet>> expand_impl(const WfNet& net, Index i,
                                                                   Index o, Workspace& ws) {
  const bool places = net.is_place(i);
  ClassSet possible = places ? ClassSet{BasicClass::por11, BasicClass::pand}
                             : ClassSet{BasicClass::tand11, BasicClass::tor};
  auto drop = [&](BasicClass a, BasicClass b) {
    possible.erase(a);
    possible.erase(b);
  };

  ws.in_s.clear();
  ws.is_in.clear();
  ws.is_out.clear();
  std::vector<Index> members{i, o};
  ws.in_s.set(i);
  ws.in_s.set(o);
  ws.is_in.set(i);
  ws.is_out.set(o);
  std::deque<Index> pending{i, o};

  auto grow = [&](std::span<const Index> nodes) {
    for (auto m : nodes) {
      if (ws.in_s.test(m)) continue;
      ws.in_s.set(m);
      members.push_back(m);
      pending.push_back(m);
    }
  };

  while (!pending.empty() && !possible.empty()) {
    const Index n = pending.front();
    pending.pop_front();
    if (same_span(net.pre(n), net.pre(i)) && net.is_input(n) == net.is_input(i)) {
      if (!ws.is_in.test(n)) drop(BasicClass::por11, BasicClass::tand11);
      ws.is_in.set(n);
    } else {
      grow(net.pre(n));
    }
    if (same_span(net.post(n), net.post(o)) && net.is_output(n) == net.is_output(o)) {
      if (!ws.is_out.test(n)) drop(BasicClass::por11, BasicClass::tand11);
      ws.is_out.set(n);
    } else {
      grow(net.post(n));
    }
    const auto in_deg = count_inside(net.pre(n), ws.in_s);
    const auto out_deg = count_inside(net.post(n), ws.in_s);
    const bool in_ok = ws.is_in.test(n) ? in_deg == 0 : in_deg == 1;
    const bool out_ok = ws.is_out.test(n) ? out_deg == 0 : out_deg == 1;
    if (!in_ok || !out_ok) {
      if (net.is_place(n)) {
        drop(BasicClass::pand, BasicClass::tand11);
      } else {
        drop(BasicClass::tor, BasicClass::por11);
      }
    }
  }
  if (!possible.empty() && !restriction_acyclic(net, members, ws.in_s))
    drop(BasicClass::pand, BasicClass::tand11);
  if (possible.empty()) return std::nullopt;

  auto verified = classes_of(net, members, ws);
  if (!verified || !ws.is_in.test(i) || !ws.is_out.test(o)) return std::nullopt;
  ClassSet classes;
  std::set_intersection(possible.begin(), possible.end(), verified->begin(), verified->end(),
                        std::inserter(classes, classes.end()));
  if (classes.empty()) return std::nullopt;
  std::sort(members.begin(), members.end());
  return std::make_pair(std::move(members), std::move(classes));
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

// Nodes in scan order, and each node's position in it.
struct ScanOrder {
  std::vector<Index> nodes;
  std::vector<std::size_t> rank;
};

ScanOrder scan_order(const WfNet& net, const OrderPolicy& policy) {
  ScanOrder order;
  order.nodes.resize(net.size());
  for (Index n = 0; n < net.size(); ++n) order.nodes[n] = n;
  switch (policy.mode) {
    case OrderPolicy::Mode::lexicographic:
      break;
    case OrderPolicy::Mode::reverse_lexicographic:
      std::reverse(order.nodes.begin(), order.nodes.end());
      break;
    case OrderPolicy::Mode::shuffled: {
      std::vector<std::uint64_t> key(net.size());
      for (Index n = 0; n < net.size(); ++n)
        key[n] = splitmix64(fnv1a(net.id(n).str()) ^ splitmix64(policy.seed));
      std::sort(order.nodes.begin(), order.nodes.end(), [&](Index a, Index b) {
        return key[a] != key[b] ? key[a] < key[b] : a < b;
      });
      break;
    }
  }
  order.rank.resize(net.size());
  for (std::size_t r = 0; r < order.nodes.size(); ++r) order.rank[order.nodes[r]] = r;
  return order;
}

std::optional<FoundSubnet> found(const WfNet& net, std::vector<Index> members,
                                 ClassSet classes, ContractionRule rule) {
  return FoundSubnet{{selection_of(net, members), std::move(classes)}, rule};
}

}  // namespace

SubnetView subnet_view(const WfNet& net, const SubnetSelection& s) {
  const auto members = indices_of(net, s);
  std::vector<char> in_s(net.size(), 0);
  for (auto m : members) in_s[m] = 1;
  SubnetView view;
  auto& r = view.restriction;
  for (auto m : members) {
    (net.is_place(m) ? r.graph.places : r.graph.transitions).insert(net.id(m));
    bool entry = net.is_input(m), exit = net.is_output(m);
    for (auto p : net.pre(m)) entry = entry || !in_s[p];
    for (auto q : net.post(m)) {
      if (in_s[q]) {
        r.graph.arcs.insert({net.id(m), net.id(q)});
      } else {
        exit = true;
      }
    }
    if (entry) r.inputs.insert(net.id(m));
    if (exit) r.outputs.insert(net.id(m));
  }
  auto validated = validate(r);
  view.io_consistent = validated.report.io_inconsistent.empty();
  view.net = std::move(validated.net);
  return view;
}

bool is_well_nested(const WfNet& net, const SubnetSelection& s) {
  const auto members = indices_of(net, s);
  std::vector<char> in_s(net.size(), 0);
  for (auto m : members) in_s[m] = 1;
  auto external = [&](std::span<const Index> nodes) {
    std::vector<Index> out;
    for (auto n : nodes)
      if (!in_s[n]) out.push_back(n);
    return out;
  };
  std::optional<std::pair<std::vector<Index>, bool>> in_ref, out_ref;
  for (auto m : members) {
    const auto ext_pre = external(net.pre(m));
    if (net.is_input(m) || !ext_pre.empty()) {
      std::pair key{ext_pre, net.is_input(m)};
      if (!in_ref) in_ref = key;
      if (*in_ref != key) return false;
    }
    const auto ext_post = external(net.post(m));
    if (net.is_output(m) || !ext_post.empty()) {
      std::pair key{ext_post, net.is_output(m)};
      if (!out_ref) out_ref = key;
      if (*out_ref != key) return false;
    }
  }
  return true;
}

WfNet contract(const WfNet& net, const SubnetSelection& s, const NodeId& fresh) {
  return contract_members(net, indices_of(net, s), fresh);
}

std::optional<ClassSet> contractible_classes(const WfNet& net, const SubnetSelection& s) {
  return classes_of(net, indices_of(net, s));
}

std::optional<ContractibleSubnet> expand(const WfNet& net, const NodeId& i, const NodeId& o) {
  const auto a = net.index_of(i), b = net.index_of(o);
  if (a == b) throw std::invalid_argument("expand needs distinct input and output nodes");
  if (net.kind(a) != net.kind(b))
    throw std::invalid_argument("expand needs input and output nodes of the same kind");
  if (!reachable(net, i, o))
    throw std::invalid_argument("'" + o.str() + "' is not reachable from '" + i.str() + "'");
  Workspace ws(net.size());
  auto r = expand_impl(net, a, b, ws);
  if (!r) return std::nullopt;
  return ContractibleSubnet{selection_of(net, r->first), std::move(r->second)};
}

std::string OrderPolicy::to_string() const {
  switch (mode) {
    case Mode::lexicographic:
      return "lexicographic";
    case Mode::reverse_lexicographic:
      return "reverse";
    case Mode::shuffled:
      break;
  }
  return "shuffled(" + std::to_string(seed) + ")";
}

std::string_view to_string(ContractionRule rule) noexcept {
  switch (rule) {
    case ContractionRule::loop:
      return "loop";
    case ContractionRule::parallel:
      return "parallel";
    case ContractionRule::expand:
      break;
  }
  return "expand";
}

std::optional<FoundSubnet> find_contractible(const WfNet& net, const OrderPolicy& policy) {
  if (net.size() < 2) return std::nullopt;
  const ScanOrder order = scan_order(net, policy);
  Workspace ws(net.size());
  auto by_rank = [&](Index a, Index b) { return order.rank[a] < order.rank[b]; };
  auto check = [&](std::vector<Index> members) -> std::optional<ClassSet> {
    ws.in_s.clear();
    for (auto m : members) ws.in_s.set(m);
    return classes_of(net, members, ws);
  };

  // A place with a private self-loop transition.
  for (auto n : order.nodes) {
    if (!net.is_place(n)) continue;
    std::vector<Index> loops(net.post(n).begin(), net.post(n).end());
    std::sort(loops.begin(), loops.end(), by_rank);
    for (auto t : loops) {
      if (net.pre(t).size() != 1 || net.post(t).size() != 1 || net.post(t)[0] != n) continue;
      if (net.is_input(t) || net.is_output(t)) continue;
      std::vector<Index> members{std::min(n, t), std::max(n, t)};
      if (auto classes = check(members))
        return found(net, std::move(members), std::move(*classes), ContractionRule::loop);
    }
  }

  // Two same-kind nodes with identical presets, postsets and interface roles.
  using Key = std::tuple<NodeKind, std::vector<Index>, std::vector<Index>, bool, bool>;
  std::map<Key, std::vector<Index>> groups;
  for (Index n = 0; n < net.size(); ++n) {
    groups[{net.kind(n),
            {net.pre(n).begin(), net.pre(n).end()},
            {net.post(n).begin(), net.post(n).end()},
            net.is_input(n),
            net.is_output(n)}]
        .push_back(n);
  }
  std::vector<std::pair<Index, Index>> parallel;
  for (auto& [key, members] : groups) {
    if (members.size() < 2) continue;
    std::sort(members.begin(), members.end(), by_rank);
    parallel.emplace_back(members[0], members[1]);
  }
  std::sort(parallel.begin(), parallel.end(), [&](const auto& a, const auto& b) {
    return std::pair{order.rank[a.first], order.rank[a.second]} <
           std::pair{order.rank[b.first], order.rank[b.second]};
  });
  for (auto [a, b] : parallel) {
    std::vector<Index> members{std::min(a, b), std::max(a, b)};
    if (auto classes = check(members))
      return found(net, std::move(members), std::move(*classes), ContractionRule::parallel);
  }

  // Expansion from every input candidate to every reachable output candidate.
  std::vector<Index> targets;
  for (auto n1 : order.nodes) {
    const Index seed[] = {n1};
    const auto reach = detail::closure(net, seed, true);
    targets.clear();
    for (Index n2 = 0; n2 < net.size(); ++n2)
      if (n2 != n1 && reach[n2] && net.kind(n2) == net.kind(n1)) targets.push_back(n2);
    std::sort(targets.begin(), targets.end(), by_rank);
    for (auto n2 : targets) {
      if (auto r = expand_impl(net, n1, n2, ws))
        return found(net, std::move(r->first), std::move(r->second), ContractionRule::expand);
    }
  }
  return std::nullopt;
}

ReduceResult reduce(const WfNet& net, const ReduceOptions& options) {
  std::set<NodeId> seen;
  std::unordered_map<NodeId, RefinementTree> trees;
  for (Index n = 0; n < net.size(); ++n) {
    seen.insert(net.id(n));
    trees.emplace(net.id(n), RefinementTree{net.id(n), {}, {}});
  }
  std::size_t counter = 0;
  auto next_fresh = [&] {
    for (;;) {
      NodeId id("ctr_" + std::to_string(++counter));
      if (seen.insert(id).second) return id;
    }
  };

  ReduceResult result{net, {}, 0};
  while (auto hit = find_contractible(result.net, options.policy)) {
    const NodeId fresh = next_fresh();
    WfNet after = contract(result.net, hit->subnet.members, fresh);
    if (options.on_contraction) options.on_contraction({result.net, after, *hit, fresh});
    RefinementTree node{fresh, hit->subnet.classes, {}};
    for (const auto& m : hit->subnet.members) {
      auto it = trees.find(m);
      node.children.push_back(std::move(it->second));
      trees.erase(it);
    }
    trees.emplace(fresh, std::move(node));
    result.net = std::move(after);
    ++result.contractions;
  }
  for (auto& [id, tree] : trees) {
    tree.canonicalize();
    result.trees.push_back(std::move(tree));
  }
  std::sort(result.trees.begin(), result.trees.end(),
            [](const RefinementTree& a, const RefinementTree& b) {
              return a.first_leaf() < b.first_leaf();
            });
  return result;
}

bool is_and_or(const WfNet& net) { return reduce(net).net.size() == 1; }

bool path_quotient_check(const WfNet& before, const WfNet& after, const SubnetSelection& s,
                         const NodeId& fresh) {
  if (!(contract(before, s, fresh) == after))
    throw std::invalid_argument("'after' is not the contraction of 'before'");
  auto image = [&](Index n) {
    const NodeId& id = before.id(n);
    return after.index_of(s.count(id) ? fresh : id);
  };
  for (Index u = 0; u < before.size(); ++u) {
    const Index from_before[] = {u};
    const Index from_after[] = {image(u)};
    const auto reach_before = detail::closure(before, from_before, true);
    const auto reach_after = detail::closure(after, from_after, true);
    for (Index v = 0; v < before.size(); ++v)
      if (reach_before[v] && !reach_after[image(v)]) return false;
  }
  return true;
}

std::string_view to_string(OverlapCase c) noexcept {
  switch (c) {
    case OverlapCase::disjoint:
      return "A (disjoint)";
    case OverlapCase::overlapping_different_types:
      return "B (overlapping, different I/O types)";
    case OverlapCase::overlapping_same_type:
      return "C (overlapping, same I/O type)";
    case OverlapCase::nested:
      break;
  }
  return "D (nested)";
}

namespace {

SubnetSelection minus(const SubnetSelection& a, const SubnetSelection& b) {
  SubnetSelection out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::inserter(out, out.end()));
  return out;
}

// One contraction step of the commutation check; records the first failure.
std::optional<WfNet> step(const std::optional<WfNet>& net, const SubnetSelection& s,
                          const NodeId& fresh, std::string& failure) {
  if (!net) return std::nullopt;
  if (!contractible_classes(*net, s)) {
    if (failure.empty()) {
      failure = "selection {";
      for (const auto& id : s) failure += " " + id.str();
      failure += " } is not contractible";
    }
    return std::nullopt;
  }
  return contract(*net, s, fresh);
}

}  // namespace

CommutationResult check_commutation(const WfNet& net, const SubnetSelection& s1,
                                    const SubnetSelection& s2, const NodeId& n1,
                                    const NodeId& n2, const NodeId& n3) {
  CommutationResult r;
  SubnetSelection shared;
  std::set_intersection(s1.begin(), s1.end(), s2.begin(), s2.end(),
                        std::inserter(shared, shared.end()));
  const std::optional<WfNet> start = net;
  auto& fail = r.failure;
  if (shared.empty()) {
    r.overlap = OverlapCase::disjoint;
    r.first_then_second = step(step(start, s1, n1, fail), s2, n2, fail);
    r.second_then_first = step(step(start, s2, n2, fail), s1, n1, fail);
  } else if (shared == s1 || shared == s2) {
    r.overlap = OverlapCase::nested;
    const auto& outer = shared == s2 ? s1 : s2;
    const auto& inner = shared == s2 ? s2 : s1;
    auto rest = minus(outer, inner);
    rest.insert(n2);
    r.first_then_second = step(start, outer, n1, fail);
    r.second_then_first = step(step(start, inner, n2, fail), rest, n1, fail);
  } else {
    const auto v1 = subnet_view(net, s1), v2 = subnet_view(net, s2);
    if (!v1.net || !v2.net) {
      fail = "selections are not WF subnets";
      return r;
    }
    if (v1.net->io_type() != v2.net->io_type()) {
      r.overlap = OverlapCase::overlapping_different_types;
      r.first_then_second = step(step(start, s1, n1, fail), minus(s2, s1), n2, fail);
      r.second_then_first = step(step(start, s2, n2, fail), minus(s1, s2), n1, fail);
    } else {
      r.overlap = OverlapCase::overlapping_same_type;
      auto rest2 = minus(s2, s1);
      rest2.insert(n1);
      auto rest1 = minus(s1, s2);
      rest1.insert(n2);
      r.first_then_second = step(step(start, s1, n1, fail), rest2, n3, fail);
      r.second_then_first = step(step(start, s2, n2, fail), rest1, n3, fail);
    }
  }
  if (fail.empty() && !(*r.first_then_second == *r.second_then_first))
    fail = "the two contraction orders give different nets";
  return r;
}

}  // namespace wfnet
