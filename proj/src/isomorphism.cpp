#include "wfnet/isomorphism.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <tuple>

namespace wfnet {

namespace {

using Index = WfNet::Index;
using Colors = std::vector<std::size_t>;
constexpr Index kUnmapped = std::numeric_limits<Index>::max();

// Color refinement run on both nets with one shared palette, so equal colors
// mean equal local structure across the two nets.
std::pair<Colors, Colors> refine(const WfNet& a, const WfNet& b) {
  using Sig = std::tuple<std::size_t, std::vector<std::size_t>, std::vector<std::size_t>>;
  auto initial = [](const WfNet& net, Index n) {
    return std::tuple{net.is_place(n), net.is_input(n), net.is_output(n), net.pre(n).size(),
                      net.post(n).size()};
  };
  std::map<decltype(initial(a, 0)), std::size_t> palette0;
  Colors ca(a.size()), cb(b.size());
  for (Index n = 0; n < a.size(); ++n) palette0.try_emplace(initial(a, n), palette0.size());
  for (Index n = 0; n < b.size(); ++n) palette0.try_emplace(initial(b, n), palette0.size());
  for (Index n = 0; n < a.size(); ++n) ca[n] = palette0.at(initial(a, n));
  for (Index n = 0; n < b.size(); ++n) cb[n] = palette0.at(initial(b, n));

  std::size_t classes = palette0.size();
  for (;;) {
    auto signature = [](const WfNet& net, const Colors& c, Index n) {
      Sig s{c[n], {}, {}};
      for (auto m : net.pre(n)) std::get<1>(s).push_back(c[m]);
      for (auto m : net.post(n)) std::get<2>(s).push_back(c[m]);
      std::sort(std::get<1>(s).begin(), std::get<1>(s).end());
      std::sort(std::get<2>(s).begin(), std::get<2>(s).end());
      return s;
    };
    std::map<Sig, std::size_t> palette;
    std::vector<Sig> sa, sb;
    for (Index n = 0; n < a.size(); ++n) sa.push_back(signature(a, ca, n));
    for (Index n = 0; n < b.size(); ++n) sb.push_back(signature(b, cb, n));
    for (const auto& s : sa) palette.try_emplace(s, 0);
    for (const auto& s : sb) palette.try_emplace(s, 0);
    std::size_t next = 0;
    for (auto& [sig, color] : palette) color = next++;
    for (Index n = 0; n < a.size(); ++n) ca[n] = palette.at(sa[n]);
    for (Index n = 0; n < b.size(); ++n) cb[n] = palette.at(sb[n]);
    if (palette.size() == classes) break;
    classes = palette.size();
  }
  return {ca, cb};
}

class Matcher {
 public:
  Matcher(const WfNet& a, const WfNet& b, Colors ca, Colors cb)
      : a_(a), b_(b), ca_(std::move(ca)), cb_(std::move(cb)),
        map_(a.size(), kUnmapped), used_(b.size(), false) {
    for (Index n = 0; n < b.size(); ++n) by_color_[cb_[n]].push_back(n);
    build_order();
  }

  bool run() { return extend(0); }

  IsoMapping mapping() const {
    IsoMapping m;
    for (Index n = 0; n < a_.size(); ++n) m.emplace(a_.id(n), b_.id(map_[n]));
    return m;
  }

 private:
  // BFS from the rarest colors so each new node is adjacent to mapped ones.
  void build_order() {
    std::vector<Index> seeds(a_.size());
    for (Index n = 0; n < a_.size(); ++n) seeds[n] = n;
    std::stable_sort(seeds.begin(), seeds.end(), [&](Index x, Index y) {
      return by_color_[ca_[x]].size() < by_color_[ca_[y]].size();
    });
    std::vector<bool> queued(a_.size(), false);
    for (auto s : seeds) {
      if (queued[s]) continue;
      std::deque<Index> q{s};
      queued[s] = true;
      while (!q.empty()) {
        auto n = q.front();
        q.pop_front();
        order_.push_back(n);
        for (auto span : {a_.pre(n), a_.post(n)})
          for (auto m : span)
            if (!queued[m]) {
              queued[m] = true;
              q.push_back(m);
            }
      }
    }
  }

  bool consistent(Index x, Index y) const {
    for (auto m : a_.post(x))
      if (map_[m] != kUnmapped && !b_.has_arc(y, map_[m])) return false;
    for (auto m : a_.pre(x))
      if (map_[m] != kUnmapped && !b_.has_arc(map_[m], y)) return false;
    return true;
  }

  bool extend(std::size_t depth) {
    if (depth == order_.size()) return true;
    const Index x = order_[depth];
    for (auto y : by_color_.at(ca_[x])) {
      if (used_[y] || !consistent(x, y)) continue;
      map_[x] = y;
      used_[y] = true;
      if (extend(depth + 1)) return true;
      map_[x] = kUnmapped;
      used_[y] = false;
    }
    return false;
  }

  const WfNet& a_;
  const WfNet& b_;
  Colors ca_, cb_;
  std::vector<Index> map_;
  std::vector<bool> used_;
  std::map<std::size_t, std::vector<Index>> by_color_;
  std::vector<Index> order_;
};

}  // namespace

std::optional<IsoMapping> isomorphic(const WfNet& a, const WfNet& b) {
  if (a.place_count() != b.place_count() || a.transition_count() != b.transition_count() ||
      a.arc_count() != b.arc_count() || a.input_ids().size() != b.input_ids().size() ||
      a.output_ids().size() != b.output_ids().size())
    return std::nullopt;
  auto [ca, cb] = refine(a, b);
  auto sa = ca, sb = cb;
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  if (sa != sb) return std::nullopt;
  Matcher m(a, b, std::move(ca), std::move(cb));
  if (!m.run()) return std::nullopt;
  return m.mapping();
}

}  // namespace wfnet
