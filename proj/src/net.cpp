#include "wfnet/net.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <sstream>

namespace wfnet {

bool is_valid_node_id(std::string_view text) noexcept {
  if (text.empty()) return false;
  return std::all_of(text.begin(), text.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
           (c >= '0' && c <= '9') || c == '_';
  });
}

std::string_view to_string(NodeKind kind) noexcept {
  return kind == NodeKind::place ? "place" : "transition";
}

bool ValidationReport::ok() const noexcept {
  return invalid_ids.empty() && place_and_transition.empty() &&
         dangling_arcs.empty() && non_bipartite_arcs.empty() &&
         unknown_interface_nodes.empty() && !empty_inputs && !empty_outputs &&
         io_inconsistent.empty() && unreachable.empty() && dead_ends.empty();
}

namespace {

void list_ids(std::ostream& os, const char* label, const std::vector<NodeId>& ids) {
  if (ids.empty()) return;
  os << label << ':';
  for (const auto& id : ids) os << ' ' << id;
  os << '\n';
}

void list_arcs(std::ostream& os, const char* label, const std::vector<Arc>& arcs) {
  if (arcs.empty()) return;
  os << label << ':';
  for (const auto& a : arcs) os << ' ' << a.source << "->" << a.target;
  os << '\n';
}

}  // namespace

std::string ValidationReport::to_string() const {
  std::ostringstream os;
  list_ids(os, "invalid node ids", invalid_ids);
  list_ids(os, "nodes declared as place and transition", place_and_transition);
  list_arcs(os, "arcs referencing undeclared nodes", dangling_arcs);
  list_arcs(os, "non-bipartite arcs", non_bipartite_arcs);
  list_ids(os, "undeclared interface nodes", unknown_interface_nodes);
  if (empty_inputs) os << "input set is empty\n";
  if (empty_outputs) os << "output set is empty\n";
  list_ids(os, "not I/O consistent", io_inconsistent);
  list_ids(os, "unreachable from inputs", unreachable);
  list_ids(os, "cannot reach an output", dead_ends);
  for (const auto& w : warnings) os << "warning: " << w << '\n';
  return os.str();
}

std::optional<WfNet::Index> WfNet::find(const NodeId& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

WfNet::Index WfNet::index_of(const NodeId& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) throw UnknownNodeError(id);
  return it->second;
}

std::vector<NodeId> WfNet::places() const {
  std::vector<NodeId> out;
  for (Index n = 0; n < size(); ++n)
    if (is_place(n)) out.push_back(ids_[n]);
  return out;
}

std::vector<NodeId> WfNet::transitions() const {
  std::vector<NodeId> out;
  for (Index n = 0; n < size(); ++n)
    if (!is_place(n)) out.push_back(ids_[n]);
  return out;
}

std::vector<NodeId> WfNet::input_ids() const {
  std::vector<NodeId> out;
  for (Index n : inputs_) out.push_back(ids_[n]);
  return out;
}

std::vector<NodeId> WfNet::output_ids() const {
  std::vector<NodeId> out;
  for (Index n : outputs_) out.push_back(ids_[n]);
  return out;
}

std::vector<Arc> WfNet::arcs() const {
  std::vector<Arc> out;
  out.reserve(arc_count_);
  for (Index n = 0; n < size(); ++n)
    for (Index m : post_[n]) out.push_back({ids_[n], ids_[m]});
  return out;
}

IoNet WfNet::to_io_net() const {
  IoNet io;
  for (Index n = 0; n < size(); ++n) {
    (is_place(n) ? io.graph.places : io.graph.transitions).insert(ids_[n]);
    for (Index m : post_[n]) io.graph.arcs.insert({ids_[n], ids_[m]});
  }
  for (Index n : inputs_) io.inputs.insert(ids_[n]);
  for (Index n : outputs_) io.outputs.insert(ids_[n]);
  return io;
}

bool operator==(const WfNet& a, const WfNet& b) {
  return a.ids_ == b.ids_ && a.kinds_ == b.kinds_ && a.post_ == b.post_ &&
         a.inputs_ == b.inputs_ && a.outputs_ == b.outputs_;
}

namespace detail {

std::vector<char> closure(const WfNet& net, std::span<const WfNet::Index> seeds,
                          bool forward) {
  std::vector<char> seen(net.size(), 0);
  std::deque<WfNet::Index> queue;
  for (auto s : seeds) {
    if (!seen[s]) {
      seen[s] = 1;
      queue.push_back(s);
    }
  }
  while (!queue.empty()) {
    auto n = queue.front();
    queue.pop_front();
    for (auto m : forward ? net.post(n) : net.pre(n)) {
      if (!seen[m]) {
        seen[m] = 1;
        queue.push_back(m);
      }
    }
  }
  return seen;
}

}  // namespace detail

ValidationResult validate(const IoNet& candidate) {
  ValidationResult result;
  ValidationReport& report = result.report;
  report.warnings = candidate.warnings;
  const auto& g = candidate.graph;

  for (const auto& id : g.places)
    if (!is_valid_node_id(id.str())) report.invalid_ids.push_back(id);
  for (const auto& id : g.transitions) {
    if (!is_valid_node_id(id.str())) report.invalid_ids.push_back(id);
    if (g.places.count(id)) report.place_and_transition.push_back(id);
  }

  auto kind_of = [&](const NodeId& id) -> std::optional<NodeKind> {
    if (g.places.count(id)) return NodeKind::place;
    if (g.transitions.count(id)) return NodeKind::transition;
    return std::nullopt;
  };

  for (const auto& arc : g.arcs) {
    auto ks = kind_of(arc.source);
    auto kt = kind_of(arc.target);
    if (!ks || !kt) {
      report.dangling_arcs.push_back(arc);
    } else if (*ks == *kt) {
      report.non_bipartite_arcs.push_back(arc);
    }
  }

  report.empty_inputs = candidate.inputs.empty();
  report.empty_outputs = candidate.outputs.empty();
  std::vector<NodeId> iface_places, iface_transitions;
  std::set<NodeId> iface;
  iface.insert(candidate.inputs.begin(), candidate.inputs.end());
  iface.insert(candidate.outputs.begin(), candidate.outputs.end());
  for (const auto& id : iface) {
    auto k = kind_of(id);
    if (!k) {
      report.unknown_interface_nodes.push_back(id);
    } else {
      (*k == NodeKind::place ? iface_places : iface_transitions).push_back(id);
    }
  }
  if (!iface_places.empty() && !iface_transitions.empty()) {
    report.io_inconsistent = iface_places.size() > iface_transitions.size()
                                 ? iface_transitions
                                 : iface_places;
  }

  // Connectivity is computed over the well-formed part of the graph so that
  // structural violations do not hide it.
  std::map<NodeId, WfNet::Index> order;
  for (const auto& id : g.places) order.emplace(id, 0);
  for (const auto& id : g.transitions) order.emplace(id, 0);
  std::vector<NodeId> ids;
  ids.reserve(order.size());
  for (auto& [id, idx] : order) {
    idx = static_cast<WfNet::Index>(ids.size());
    ids.push_back(id);
  }
  std::vector<std::vector<WfNet::Index>> pre(ids.size()), post(ids.size());
  std::size_t arc_count = 0;
  for (const auto& arc : g.arcs) {
    auto a = order.find(arc.source), b = order.find(arc.target);
    if (a == order.end() || b == order.end()) continue;
    post[a->second].push_back(b->second);
    pre[b->second].push_back(a->second);
    ++arc_count;
  }
  for (auto& v : pre) std::sort(v.begin(), v.end());
  for (auto& v : post) std::sort(v.begin(), v.end());

  auto bfs = [&](const std::set<NodeId>& seeds, bool forward) {
    std::vector<char> seen(ids.size(), 0);
    std::deque<WfNet::Index> queue;
    for (const auto& s : seeds) {
      auto it = order.find(s);
      if (it == order.end()) continue;
      seen[it->second] = 1;
      queue.push_back(it->second);
    }
    while (!queue.empty()) {
      auto n = queue.front();
      queue.pop_front();
      for (auto m : forward ? post[n] : pre[n]) {
        if (!seen[m]) {
          seen[m] = 1;
          queue.push_back(m);
        }
      }
    }
    return seen;
  };
  auto from_inputs = bfs(candidate.inputs, true);
  auto to_outputs = bfs(candidate.outputs, false);
  for (WfNet::Index n = 0; n < ids.size(); ++n) {
    if (!from_inputs[n]) report.unreachable.push_back(ids[n]);
    if (!to_outputs[n]) report.dead_ends.push_back(ids[n]);
  }

  if (!report.ok()) return result;

  WfNet net;
  net.ids_ = std::move(ids);
  net.kinds_.resize(net.ids_.size());
  net.is_input_.assign(net.ids_.size(), 0);
  net.is_output_.assign(net.ids_.size(), 0);
  for (WfNet::Index n = 0; n < net.ids_.size(); ++n) {
    const bool place = g.places.count(net.ids_[n]) != 0;
    net.kinds_[n] = place ? NodeKind::place : NodeKind::transition;
    if (place) ++net.place_count_;
    net.index_.emplace(net.ids_[n], n);
  }
  for (const auto& id : candidate.inputs) {
    auto n = order.at(id);
    net.is_input_[n] = 1;
    net.inputs_.push_back(n);
  }
  for (const auto& id : candidate.outputs) {
    auto n = order.at(id);
    net.is_output_[n] = 1;
    net.outputs_.push_back(n);
  }
  std::sort(net.inputs_.begin(), net.inputs_.end());
  std::sort(net.outputs_.begin(), net.outputs_.end());
  net.pre_ = std::move(pre);
  net.post_ = std::move(post);
  net.arc_count_ = arc_count;
  net.io_type_ = net.kinds_[net.inputs_.front()];
  result.net = std::move(net);
  return result;
}

WfNet validate_or_throw(const IoNet& candidate) {
  auto result = validate(candidate);
  if (!result.net) {
    throw std::invalid_argument("not a WF net:\n" + result.report.to_string());
  }
  return std::move(*result.net);
}

NetBuilder& NetBuilder::place(NodeId id) {
  net_.graph.places.insert(std::move(id));
  return *this;
}

NetBuilder& NetBuilder::transition(NodeId id) {
  net_.graph.transitions.insert(std::move(id));
  return *this;
}

NetBuilder& NetBuilder::arc(NodeId source, NodeId target) {
  net_.graph.arcs.insert({std::move(source), std::move(target)});
  return *this;
}

NetBuilder& NetBuilder::input(NodeId id) {
  net_.inputs.insert(std::move(id));
  return *this;
}

NetBuilder& NetBuilder::output(NodeId id) {
  net_.outputs.insert(std::move(id));
  return *this;
}

WfNet NetBuilder::build() const { return validate_or_throw(net_); }

std::vector<NodeId> preset(const WfNet& net, const NodeId& n) {
  std::vector<NodeId> out;
  for (auto m : net.pre(net.index_of(n))) out.push_back(net.id(m));
  return out;
}

std::vector<NodeId> postset(const WfNet& net, const NodeId& n) {
  std::vector<NodeId> out;
  for (auto m : net.post(net.index_of(n))) out.push_back(net.id(m));
  return out;
}

bool reachable(const WfNet& net, const NodeId& from, const NodeId& to) {
  const WfNet::Index seed[] = {net.index_of(from)};
  const auto target = net.index_of(to);
  return detail::closure(net, seed, true)[target] != 0;
}

bool is_acyclic(const WfNet& net) {
  std::vector<std::size_t> indegree(net.size());
  std::vector<WfNet::Index> ready;
  for (WfNet::Index n = 0; n < net.size(); ++n) {
    indegree[n] = net.pre(n).size();
    if (indegree[n] == 0) ready.push_back(n);
  }
  std::size_t visited = 0;
  while (!ready.empty()) {
    auto n = ready.back();
    ready.pop_back();
    ++visited;
    for (auto m : net.post(n))
      if (--indegree[m] == 0) ready.push_back(m);
  }
  return visited == net.size();
}

NodeId fresh_id(const WfNet& net, const std::string& base) {
  if (!net.contains(NodeId(base))) return NodeId(base);
  for (std::size_t k = 1;; ++k) {
    NodeId candidate(base + "_" + std::to_string(k));
    if (!net.contains(candidate)) return candidate;
  }
}

namespace {

WfNet complete(const WfNet& net, NodeKind added, const char* in_name,
               const char* out_name) {
  IoNet io = net.to_io_net();
  const NodeId in = fresh_id(net, in_name);
  const NodeId out = fresh_id(net, out_name);
  auto& bucket = added == NodeKind::place ? io.graph.places : io.graph.transitions;
  bucket.insert(in);
  bucket.insert(out);
  for (const auto& i : io.inputs) io.graph.arcs.insert({in, i});
  for (const auto& o : io.outputs) io.graph.arcs.insert({o, out});
  io.inputs = {in};
  io.outputs = {out};
  return validate_or_throw(io);
}

}  // namespace

WfNet place_completion(const WfNet& net) {
  if (net.io_type() != IoType::transition)
    throw std::invalid_argument("place completion needs a tWF net");
  return complete(net, NodeKind::place, "p_i", "p_o");
}

WfNet transition_completion(const WfNet& net) {
  if (net.io_type() != IoType::place)
    throw std::invalid_argument("transition completion needs a pWF net");
  return complete(net, NodeKind::transition, "t_i", "t_o");
}

}  // namespace wfnet
