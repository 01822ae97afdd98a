#include "wfnet/andor.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace wfnet {

namespace {

// (n ∈ iface ∧ degree = 0) ∨ (n ∉ iface ∧ degree = 1)
bool one_edge_or_interface(bool in_iface, std::size_t degree) {
  return in_iface ? degree == 0 : degree == 1;
}

bool property_holds_for(const WfNet& net, NodeKind kind) {
  for (WfNet::Index n = 0; n < net.size(); ++n) {
    if (net.kind(n) != kind) continue;
    if (!one_edge_or_interface(net.is_input(n), net.pre(n).size())) return false;
    if (!one_edge_or_interface(net.is_output(n), net.post(n).size())) return false;
  }
  return true;
}

}  // namespace

bool has_and_property(const WfNet& net) { return property_holds_for(net, NodeKind::place); }

bool has_or_property(const WfNet& net) {
  return property_holds_for(net, NodeKind::transition);
}

ClassSet ClassLabel::basic_classes() const {
  ClassSet out;
  if (is_pand()) out.insert(BasicClass::pand);
  if (is_tand() && one_input && one_output) out.insert(BasicClass::tand11);
  if (is_por() && one_input && one_output) out.insert(BasicClass::por11);
  if (is_tor()) out.insert(BasicClass::tor);
  return out;
}

std::string ClassLabel::to_string() const {
  std::ostringstream os;
  os << "io-type: " << wfnet::to_string(io_type) << '\n'
     << "and-property: " << (and_property ? "yes" : "no") << '\n'
     << "or-property: " << (or_property ? "yes" : "no") << '\n'
     << "acyclic: " << (acyclic ? "yes" : "no") << '\n'
     << "one-input: " << (one_input ? "yes" : "no") << '\n'
     << "one-output: " << (one_output ? "yes" : "no") << '\n'
     << "basic classes:";
  const auto classes = basic_classes();
  if (classes.empty()) os << " none";
  for (auto c : classes) os << ' ' << wfnet::to_string(c);
  os << '\n';
  return os.str();
}

ClassLabel classify(const WfNet& net) {
  ClassLabel label;
  label.and_property = has_and_property(net);
  label.or_property = has_or_property(net);
  label.acyclic = is_acyclic(net);
  label.one_input = net.inputs().size() == 1;
  label.one_output = net.outputs().size() == 1;
  label.io_type = net.io_type();
  return label;
}

WfNet substitute(const WfNet& host, const NodeId& n, const WfNet& inner) {
  const auto at = host.index_of(n);
  if (inner.io_type() != host.kind(at)) {
    throw std::invalid_argument("cannot substitute " + std::string(to_string(host.kind(at))) +
                                " '" + n.str() + "' with a net of I/O type " +
                                std::string(to_string(inner.io_type())));
  }
  for (WfNet::Index m = 0; m < inner.size(); ++m) {
    if (host.contains(inner.id(m)))
      throw std::invalid_argument("substituted net reuses host id '" + inner.id(m).str() + "'");
  }

  IoNet io = host.to_io_net();
  (host.is_place(at) ? io.graph.places : io.graph.transitions).erase(n);
  std::erase_if(io.graph.arcs, [&](const Arc& a) { return a.source == n || a.target == n; });
  const IoNet sub = inner.to_io_net();
  io.graph.places.insert(sub.graph.places.begin(), sub.graph.places.end());
  io.graph.transitions.insert(sub.graph.transitions.begin(), sub.graph.transitions.end());
  io.graph.arcs.insert(sub.graph.arcs.begin(), sub.graph.arcs.end());
  for (auto pred : host.pre(at))
    for (const auto& i : sub.inputs) io.graph.arcs.insert({host.id(pred), i});
  for (auto succ : host.post(at))
    for (const auto& o : sub.outputs) io.graph.arcs.insert({o, host.id(succ)});
  if (io.inputs.erase(n)) io.inputs.insert(sub.inputs.begin(), sub.inputs.end());
  if (io.outputs.erase(n)) io.outputs.insert(sub.outputs.begin(), sub.outputs.end());
  return validate_or_throw(io);
}

namespace {

// Layered fork/join DAG: every place gets one producer (or is an input) and
// one consumer (or is an output).
WfNet make_pand(std::size_t budget, Rng& rng, IdSource& ids) {
  NetBuilder b;
  std::vector<NodeId> open;
  std::size_t used = 0;
  const std::size_t max_transitions = (budget - 1) / 2;
  const std::size_t transitions = rng.below(max_transitions + 1);
  for (std::size_t j = 0; j < transitions; ++j) {
    const std::size_t left_after = transitions - j - 1;
    // Reserve one transition and one output place for each later transition.
    auto spare = [&] { return budget - used - 2 * left_after; };
    const NodeId t = ids.next_transition();
    b.transition(t);
    ++used;
    const std::size_t want_in = 1 + rng.below(2);
    std::size_t got_in = 0;
    for (std::size_t k = 0; k < want_in; ++k) {
      const bool reuse = !open.empty() && (rng.chance(65) || spare() < 2);
      if (reuse) {
        const auto pick = rng.below(open.size());
        b.arc(open[pick], t);
        open.erase(open.begin() + static_cast<std::ptrdiff_t>(pick));
        ++got_in;
      } else if (got_in == 0 || spare() >= 2) {
        const NodeId p = ids.next_place();
        b.place(p).input(p).arc(p, t);
        ++used;
        ++got_in;
      }
    }
    const std::size_t want_out = 1 + rng.below(2);
    for (std::size_t k = 0; k < want_out; ++k) {
      if (k > 0 && spare() < 2) break;
      const NodeId p = ids.next_place();
      b.place(p).arc(t, p);
      open.push_back(p);
      ++used;
    }
  }
  if (transitions == 0 || (used < budget && rng.chance(15))) {
    // An isolated place that is both input and output.
    const NodeId p = ids.next_place();
    b.place(p).input(p).output(p);
  }
  for (const auto& p : open) b.output(p);
  return b.build();
}

// Single source transition forking into places, joined down to a single
// sink transition.
WfNet make_tand11(std::size_t budget, Rng& rng, IdSource& ids) {
  NetBuilder b;
  if (budget < 3) {
    const NodeId t = ids.next_transition();
    return b.transition(t).input(t).output(t).build();
  }
  const NodeId source = ids.next_transition();
  const NodeId sink = ids.next_transition();
  b.transition(source).input(source).transition(sink).output(sink);
  std::size_t used = 2;
  const std::size_t internal = rng.below((budget - 3) / 2 + 1);
  // Room for one more place while keeping two nodes for each pending transition.
  auto room = [&](std::size_t left) { return used + 1 + 2 * left <= budget; };
  std::vector<NodeId> open;
  auto produce = [&](const NodeId& t, std::size_t left) {
    const std::size_t want = 1 + rng.below(2);
    for (std::size_t k = 0; k < want; ++k) {
      if (k > 0 && !room(left)) break;
      const NodeId p = ids.next_place();
      b.place(p).arc(t, p);
      open.push_back(p);
      ++used;
    }
  };
  produce(source, internal);
  for (std::size_t j = 0; j < internal; ++j) {
    const NodeId t = ids.next_transition();
    b.transition(t);
    ++used;
    const std::size_t take = 1 + rng.below(std::min<std::size_t>(2, open.size()));
    for (std::size_t k = 0; k < take; ++k) {
      const auto pick = rng.below(open.size());
      b.arc(open[pick], t);
      open.erase(open.begin() + static_cast<std::ptrdiff_t>(pick));
    }
    produce(t, internal - j - 1);
  }
  for (const auto& p : open) b.arc(p, sink);
  return b.build();
}

// Forward tree from the first place plus extra forward links so that every place
// reaches the last one; returns the links as (from, to) place indices.
std::vector<std::pair<std::size_t, std::size_t>> connect_places(std::size_t k, Rng& rng) {
  std::vector<std::pair<std::size_t, std::size_t>> links;
  std::vector<std::vector<std::size_t>> succ(k);
  for (std::size_t j = 1; j < k; ++j) {
    const auto from = rng.below(j);
    links.emplace_back(from, j);
    succ[from].push_back(j);
  }
  std::vector<char> reaches_last(k, 0);
  reaches_last[k - 1] = 1;
  // Tree edges point forward, so a reverse sweep settles reachability.
  for (std::size_t j = k; j-- > 0;)
    for (auto s : succ[j]) reaches_last[j] = reaches_last[j] || reaches_last[s];
  for (std::size_t j = k; j-- > 0;) {
    if (reaches_last[j]) continue;
    std::vector<std::size_t> targets;
    for (std::size_t r = j + 1; r < k; ++r)
      if (reaches_last[r]) targets.push_back(r);
    const auto to = targets[rng.below(targets.size())];
    links.emplace_back(j, to);
    reaches_last[j] = 1;
  }
  return links;
}

// State machine with a single input and a single output place.
WfNet make_por11(std::size_t budget, Rng& rng, IdSource& ids) {
  NetBuilder b;
  if (budget < 2) {
    const NodeId p = ids.next_place();
    return b.place(p).input(p).output(p).build();
  }
  std::vector<NodeId> places;
  std::size_t used = 0;
  std::size_t k = 1;
  if (budget >= 3 && !rng.chance(15)) k = 2 + rng.below((budget - 3) / 3 + 1);
  for (std::size_t j = 0; j < k; ++j) {
    places.push_back(ids.next_place());
    b.place(places.back());
    ++used;
  }
  b.input(places.front()).output(places.back());
  auto link = [&](std::size_t from, std::size_t to) {
    const NodeId t = ids.next_transition();
    b.transition(t).arc(places[from], t).arc(t, places[to]);
    ++used;
  };
  if (k > 1) {
    for (auto [from, to] : connect_places(k, rng)) link(from, to);
  } else {
    link(0, 0);
  }
  const std::size_t extras = used < budget ? rng.below(budget - used + 1) : 0;
  for (std::size_t e = 0; e < extras; ++e) link(rng.below(k), rng.below(k));
  return b.build();
}

// State machine between input transitions and output transitions.
WfNet make_tor(std::size_t budget, Rng& rng, IdSource& ids) {
  NetBuilder b;
  if (budget < 3) {
    const NodeId t = ids.next_transition();
    return b.transition(t).input(t).output(t).build();
  }
  const std::size_t k = 1 + rng.below(budget / 3);
  std::vector<NodeId> places;
  std::size_t used = 0;
  for (std::size_t j = 0; j < k; ++j) {
    places.push_back(ids.next_place());
    b.place(places.back());
    ++used;
  }
  auto link = [&](std::size_t from, std::size_t to) {
    const NodeId t = ids.next_transition();
    b.transition(t).arc(places[from], t).arc(t, places[to]);
    ++used;
  };
  auto entry = [&](std::size_t to) {
    const NodeId t = ids.next_transition();
    b.transition(t).input(t).arc(t, places[to]);
    ++used;
  };
  auto exit = [&](std::size_t from) {
    const NodeId t = ids.next_transition();
    b.transition(t).output(t).arc(places[from], t);
    ++used;
  };
  entry(0);
  exit(k - 1);
  for (auto [from, to] : connect_places(k, rng)) link(from, to);
  const std::size_t extras = used < budget ? rng.below(budget - used + 1) : 0;
  for (std::size_t e = 0; e < extras; ++e) {
    switch (rng.below(7)) {
      case 0:
        entry(rng.below(k));
        break;
      case 1:
        exit(rng.below(k));
        break;
      case 2: {
        const NodeId t = ids.next_transition();
        b.transition(t).input(t).output(t);
        ++used;
        break;
      }
      default:
        link(rng.below(k), rng.below(k));
    }
  }
  return b.build();
}

}  // namespace

WfNet generate_basic_net(BasicClass kind, std::size_t budget, Rng& rng, IdSource& ids) {
  if (budget == 0) throw std::invalid_argument("basic net budget must be at least 1");
  WfNet net = [&] {
    switch (kind) {
      case BasicClass::pand:
        return make_pand(budget, rng, ids);
      case BasicClass::tand11:
        return make_tand11(budget, rng, ids);
      case BasicClass::por11:
        return make_por11(budget, rng, ids);
      case BasicClass::tor:
        break;
    }
    return make_tor(budget, rng, ids);
  }();
  if (!classify(net).basic_classes().count(kind))
    throw std::logic_error("generated net does not classify as " + std::string(to_string(kind)));
  return net;
}

WfNet generate_basic_net(BasicClass kind, std::size_t budget, std::uint64_t seed) {
  Rng rng(seed);
  IdSource ids;
  return generate_basic_net(kind, budget, rng, ids);
}

namespace {

RefinementTree leaves_of(const WfNet& net, NodeId node, ClassSet classes) {
  RefinementTree tree{std::move(node), std::move(classes), {}};
  for (WfNet::Index n = 0; n < net.size(); ++n) tree.children.push_back({net.id(n), {}, {}});
  return tree;
}

bool replace_leaf(RefinementTree& tree, const NodeId& leaf, RefinementTree&& with) {
  if (tree.is_leaf()) {
    if (tree.node != leaf) return false;
    tree = std::move(with);
    return true;
  }
  for (auto& c : tree.children)
    if (replace_leaf(c, leaf, std::move(with))) return true;
  return false;
}

BasicClass pick_kind(NodeKind kind, Rng& rng) {
  const bool first = rng.below(2) == 0;
  if (kind == NodeKind::place) return first ? BasicClass::pand : BasicClass::por11;
  return first ? BasicClass::tand11 : BasicClass::tor;
}

}  // namespace

GeneratedNet generate_and_or_net(const GenerationRecipe& recipe) {
  if (recipe.max_basic_net_nodes == 0)
    throw std::invalid_argument("max_basic_net_nodes must be at least 1");
  Rng rng(recipe.seed);
  IdSource ids;
  auto budget = [&] { return 1 + rng.below(recipe.max_basic_net_nodes); };

  WfNet root = generate_basic_net(pick_kind(recipe.root_io_type, rng),
                                  recipe.max_basic_net_nodes, rng, ids);
  GeneratedNet out{root, leaves_of(root, "root", classify(root).basic_classes())};
  for (std::size_t step = 0; step < recipe.substitution_steps; ++step) {
    const auto at = static_cast<WfNet::Index>(rng.below(out.net.size()));
    const NodeId target = out.net.id(at);
    WfNet inner = generate_basic_net(pick_kind(out.net.kind(at), rng), budget(), rng, ids);
    auto subtree = leaves_of(inner, target, classify(inner).basic_classes());
    out.net = substitute(out.net, target, inner);
    replace_leaf(out.tree, target, std::move(subtree));
  }
  return out;
}

}  // namespace wfnet
