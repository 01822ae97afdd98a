#include "support.hpp"

#include <algorithm>
#include <bit>
#include <deque>
#include <filesystem>
#include <stdexcept>

#include "wfnet/io.hpp"

namespace wfnet::testing {

std::string data_dir() { return WFNET_TEST_DATA_DIR; }

WfNet fixture(const std::string& name) { return load_net(data_dir() + "/" + name + ".net"); }

std::vector<std::string> fixture_names() {
  std::vector<std::string> names;
  for (const auto& e : std::filesystem::directory_iterator(data_dir()))
    if (e.path().extension() == ".net") names.push_back(e.path().stem().string());
  std::sort(names.begin(), names.end());
  return names;
}

int SmallNet::index(const std::string& name) const {
  auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) throw std::invalid_argument("no node " + name);
  return static_cast<int>(it - names.begin());
}

std::string SmallNet::key() const {
  // Sort nodes by name so the key does not depend on insertion order.
  std::vector<int> order(size());
  for (std::size_t i = 0; i < size(); ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return names[a] < names[b]; });
  std::string k;
  for (int i : order) {
    k += names[i] + (is_place[i] ? "/p" : "/t") + (inputs >> i & 1 ? "I" : "") +
         (outputs >> i & 1 ? "O" : "") + ">";
    for (int j : order)
      if (post[i] >> j & 1) k += names[j] + ",";
    k += ";";
  }
  return k;
}

SmallNet small_net(const WfNet& net) {
  const auto ids = net.node_ids();
  if (ids.size() > 32) throw std::invalid_argument("oracle nets have at most 32 nodes");
  SmallNet s;
  for (const auto& id : ids) s.names.push_back(id.str());
  s.pre.assign(ids.size(), 0);
  s.post.assign(ids.size(), 0);
  const auto places = net.places();
  for (const auto& id : ids)
    s.is_place.push_back(std::find(places.begin(), places.end(), id) != places.end());
  for (const auto& arc : net.arcs()) {
    const int a = s.index(arc.source.str()), b = s.index(arc.target.str());
    s.post[a] |= 1u << b;
    s.pre[b] |= 1u << a;
  }
  for (const auto& id : net.input_ids()) s.inputs |= 1u << s.index(id.str());
  for (const auto& id : net.output_ids()) s.outputs |= 1u << s.index(id.str());
  return s;
}

std::uint32_t mask_of(const SmallNet& net, const std::vector<NodeId>& ids) {
  std::uint32_t m = 0;
  for (const auto& id : ids) m |= 1u << net.index(id.str());
  return m;
}

namespace {

bool has(std::uint32_t mask, std::size_t i) { return (mask >> i & 1) != 0; }

std::uint32_t closure(const SmallNet& net, std::uint32_t s, std::uint32_t from, bool forward) {
  std::uint32_t seen = from, frontier = from;
  while (frontier) {
    std::uint32_t next = 0;
    for (std::size_t i = 0; i < net.size(); ++i)
      if (has(frontier, i)) next |= (forward ? net.post[i] : net.pre[i]) & s;
    frontier = next & ~seen;
    seen |= next;
  }
  return seen;
}

bool acyclic_within(const SmallNet& net, std::uint32_t s) {
  std::uint32_t left = s;
  for (bool progress = true; left && progress;) {
    progress = false;
    for (std::size_t i = 0; i < net.size(); ++i)
      if (has(left, i) && (net.pre[i] & left) == 0) {
        left &= ~(1u << i);
        progress = true;
      }
  }
  return left == 0;
}

}  // namespace

std::pair<std::uint32_t, std::uint32_t> oracle_interface(const SmallNet& net, std::uint32_t s) {
  std::uint32_t in = net.inputs & s, out = net.outputs & s;
  for (std::size_t i = 0; i < net.size(); ++i) {
    if (!has(s, i)) continue;
    if (net.pre[i] & ~s) in |= 1u << i;
    if (net.post[i] & ~s) out |= 1u << i;
  }
  return {in, out};
}

bool oracle_well_nested(const SmallNet& net, std::uint32_t s) {
  auto [in, out] = oracle_interface(net, s);
  std::optional<std::pair<std::uint32_t, bool>> a, b;
  for (std::size_t i = 0; i < net.size(); ++i) {
    if (has(in, i)) {
      std::pair key{net.pre[i] & ~s, has(net.inputs, i)};
      if (a && *a != key) return false;
      a = key;
    }
    if (has(out, i)) {
      std::pair key{net.post[i] & ~s, has(net.outputs, i)};
      if (b && *b != key) return false;
      b = key;
    }
  }
  return true;
}

std::optional<ClassSet> oracle_contractible(const SmallNet& net, std::uint32_t s) {
  auto [in, out] = oracle_interface(net, s);
  if (!in || !out) return std::nullopt;
  const std::uint32_t iface = in | out;
  const bool place_type = net.is_place[std::countr_zero(iface)];
  for (std::size_t i = 0; i < net.size(); ++i)
    if (has(iface, i) && net.is_place[i] != place_type) return std::nullopt;
  if (closure(net, s, in, true) != s || closure(net, s, out, false) != s) return std::nullopt;
  if (!oracle_well_nested(net, s)) return std::nullopt;

  bool and_prop = true, or_prop = true;
  for (std::size_t i = 0; i < net.size(); ++i) {
    if (!has(s, i)) continue;
    const int pre_in = std::popcount(net.pre[i] & s), post_in = std::popcount(net.post[i] & s);
    const bool ok = (has(in, i) ? pre_in == 0 : pre_in == 1) &&
                    (has(out, i) ? post_in == 0 : post_in == 1);
    if (!ok) (net.is_place[i] ? and_prop : or_prop) = false;
  }
  const bool one_one = std::popcount(in) == 1 && std::popcount(out) == 1;
  const bool acyclic = acyclic_within(net, s);
  ClassSet classes;
  if (and_prop && acyclic && place_type) classes.insert(BasicClass::pand);
  if (and_prop && acyclic && !place_type && one_one) classes.insert(BasicClass::tand11);
  if (or_prop && place_type && one_one) classes.insert(BasicClass::por11);
  if (or_prop && !place_type) classes.insert(BasicClass::tor);
  if (classes.empty()) return std::nullopt;
  return classes;
}

SmallNet oracle_contract(const SmallNet& net, std::uint32_t s, const std::string& fresh) {
  auto [in, out] = oracle_interface(net, s);
  std::vector<int> keep;
  for (std::size_t i = 0; i < net.size(); ++i)
    if (!has(s, i)) keep.push_back(static_cast<int>(i));
  SmallNet r;
  for (int i : keep) {
    r.names.push_back(net.names[i]);
    r.is_place.push_back(net.is_place[i]);
  }
  r.names.push_back(fresh);
  r.is_place.push_back(net.is_place[std::countr_zero(in | out)]);
  const std::size_t f = keep.size();
  r.pre.assign(r.names.size(), 0);
  r.post.assign(r.names.size(), 0);
  auto image = [&](std::size_t i) {
    if (has(s, i)) return f;
    return static_cast<std::size_t>(std::find(keep.begin(), keep.end(), static_cast<int>(i)) -
                                    keep.begin());
  };
  for (std::size_t a = 0; a < net.size(); ++a)
    for (std::size_t b = 0; b < net.size(); ++b) {
      if (!has(net.post[a], b) || (has(s, a) && has(s, b))) continue;
      r.post[image(a)] |= 1u << image(b);
      r.pre[image(b)] |= 1u << image(a);
    }
  for (std::size_t i = 0; i < net.size(); ++i) {
    if (has(net.inputs, i)) r.inputs |= 1u << image(i);
    if (has(net.outputs, i)) r.outputs |= 1u << image(i);
  }
  return r;
}

std::vector<std::uint32_t> oracle_all_contractible(const SmallNet& net) {
  std::vector<std::uint32_t> out;
  if (net.size() > 20) throw std::invalid_argument("too many nodes for subset enumeration");
  for (std::uint32_t s = 1; s <= net.all(); ++s)
    if (std::popcount(s) >= 2 && oracle_contractible(net, s)) out.push_back(s);
  return out;
}

bool AndOrOracle::is_and_or(const SmallNet& net) {
  if (net.size() == 1) return true;
  const auto key = net.key();
  if (auto it = memo_.find(key); it != memo_.end()) return it->second;
  bool result = false;
  for (auto s : oracle_all_contractible(net)) {
    // Name the new node by the members it absorbs, so different orders that
    // reach the same grouping share a memo entry.
    std::vector<std::string> members;
    for (std::size_t i = 0; i < net.size(); ++i)
      if (has(s, i)) members.push_back(net.names[i]);
    std::sort(members.begin(), members.end());
    std::string fresh = "(";
    for (const auto& m : members) fresh += m + " ";
    fresh += ")";
    if (is_and_or(oracle_contract(net, s, fresh))) {
      result = true;
      break;
    }
  }
  memo_.emplace(key, result);
  return result;
}

bool oracle_reachable(const WfNet& net, const NodeId& from, const NodeId& to) {
  const auto arcs = net.arcs();
  std::set<NodeId> seen{from};
  std::deque<NodeId> queue{from};
  while (!queue.empty()) {
    auto n = queue.front();
    queue.pop_front();
    if (n == to) return true;
    for (const auto& a : arcs)
      if (a.source == n && seen.insert(a.target).second) queue.push_back(a.target);
  }
  return false;
}

namespace {

WfNet random_and_or(Rng& rng, std::size_t max_nodes) {
  for (;;) {
    GenerationRecipe recipe;
    recipe.seed = rng.below(1u << 30);
    recipe.substitution_steps = rng.below(4);
    recipe.max_basic_net_nodes = 2 + rng.below(3);
    recipe.root_io_type = rng.chance(50) ? IoType::place : IoType::transition;
    auto g = generate_and_or_net(recipe);
    if (g.net.size() <= max_nodes) return g.net;
  }
}

template <class T>
const T& pick(const std::set<T>& s, Rng& rng) {
  auto it = s.begin();
  std::advance(it, rng.below(s.size()));
  return *it;
}

std::optional<WfNet> perturbed(const WfNet& base, Rng& rng, std::size_t max_nodes) {
  IoNet io = base.to_io_net();
  auto& g = io.graph;
  const int mutations = 1 + static_cast<int>(rng.below(2));
  for (int m = 0; m < mutations; ++m) {
    switch (rng.below(5)) {
      case 0:  // extra arc
        if (!g.transitions.empty() && !g.places.empty()) {
          const auto& p = pick(g.places, rng);
          const auto& t = pick(g.transitions, rng);
          g.arcs.insert(rng.chance(50) ? Arc{p, t} : Arc{t, p});
        }
        break;
      case 1:  // drop an arc
        if (!g.arcs.empty()) g.arcs.erase(pick(g.arcs, rng));
        break;
      case 2: {  // toggle interface membership of a node of the net's I/O type
        const auto& pool = base.io_type() == IoType::place ? g.places : g.transitions;
        if (pool.empty()) break;
        const auto& n = pick(pool, rng);
        auto& side = rng.chance(50) ? io.inputs : io.outputs;
        if (!side.erase(n)) side.insert(n);
        break;
      }
      case 3: {  // reroute an arc end
        if (g.arcs.empty()) break;
        Arc a = pick(g.arcs, rng);
        g.arcs.erase(a);
        const bool source_is_place = g.places.count(a.source) != 0;
        const auto& pool = source_is_place ? g.transitions : g.places;
        if (!pool.empty()) a.target = pick(pool, rng);
        g.arcs.insert(a);
        break;
      }
      default: {  // a fresh node bridging two existing ones
        if (g.places.size() + g.transitions.size() >= max_nodes) break;
        const bool place = rng.chance(50);
        NodeId fresh(place ? "px" + std::to_string(m) : "tx" + std::to_string(m));
        const auto& other = place ? g.transitions : g.places;
        if (other.empty()) break;
        const auto a = pick(other, rng), b = pick(other, rng);
        (place ? g.places : g.transitions).insert(fresh);
        g.arcs.insert({a, fresh});
        g.arcs.insert({fresh, b});
        break;
      }
    }
  }
  return validate(io).net;
}

std::optional<WfNet> random_bipartite(Rng& rng, std::size_t max_nodes) {
  const std::size_t n = 1 + rng.below(max_nodes);
  const std::size_t places = 1 + rng.below(n);
  IoNet io;
  std::vector<NodeId> ps, ts;
  for (std::size_t i = 0; i < n; ++i) {
    if (i < places) {
      ps.emplace_back("p" + std::to_string(i));
      io.graph.places.insert(ps.back());
    } else {
      ts.emplace_back("t" + std::to_string(i));
      io.graph.transitions.insert(ts.back());
    }
  }
  const unsigned density = 20 + static_cast<unsigned>(rng.below(40));
  for (const auto& p : ps)
    for (const auto& t : ts) {
      if (rng.chance(density)) io.graph.arcs.insert({p, t});
      if (rng.chance(density)) io.graph.arcs.insert({t, p});
    }
  const auto& kind = ts.empty() || rng.chance(60) ? ps : ts;
  for (const auto& x : kind) {
    if (rng.chance(35)) io.inputs.insert(x);
    if (rng.chance(35)) io.outputs.insert(x);
  }
  return validate(io).net;
}

}  // namespace

WfNet random_small_net(Rng& rng, std::size_t max_nodes, int flavor) {
  if (flavor == 0) return random_and_or(rng, max_nodes);
  for (int attempt = 0; attempt < 10000; ++attempt) {
    auto net = flavor == 1 ? perturbed(random_and_or(rng, max_nodes), rng, max_nodes)
                           : random_bipartite(rng, max_nodes);
    if (net && net->size() <= max_nodes) return *net;
  }
  throw std::runtime_error("no valid random net found");
}

std::optional<Marking> replay(const WfNet& subject, Marking::Count k,
                              const std::vector<NodeId>& sequence) {
  Marking m = Marking::uniform(subject.input_ids(), k);
  for (const auto& t : sequence) {
    const auto enabled = enabled_transitions(subject, m);
    if (std::find(enabled.begin(), enabled.end(), t) == enabled.end()) return std::nullopt;
    m = fire(subject, m, t);
  }
  return m;
}

WfNet renamed(const WfNet& net, const std::string& suffix) {
  IoNet io;
  auto r = [&](const NodeId& id) { return NodeId(id.str() + suffix); };
  for (const auto& p : net.places()) io.graph.places.insert(r(p));
  for (const auto& t : net.transitions()) io.graph.transitions.insert(r(t));
  for (const auto& a : net.arcs()) io.graph.arcs.insert({r(a.source), r(a.target)});
  for (const auto& i : net.input_ids()) io.inputs.insert(r(i));
  for (const auto& o : net.output_ids()) io.outputs.insert(r(o));
  return validate_or_throw(io);
}

}  // namespace wfnet::testing
