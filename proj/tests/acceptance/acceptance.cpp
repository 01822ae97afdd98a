// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero if any fails.

#include <atomic>
#include <chrono>
#include <cstdio>
#include <functional>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "support.hpp"
#include "wfnet/andor.hpp"
#include "wfnet/cli.hpp"
#include "wfnet/io.hpp"
#include "wfnet/isomorphism.hpp"
#include "wfnet/reduction.hpp"
#include "wfnet/soundness.hpp"

using namespace wfnet;
namespace t = wfnet::testing;

namespace {

using Clock = std::chrono::steady_clock;

// Runtime budgets in seconds.
constexpr double classify_budget = 1.0;
constexpr double verify_budget = 1.0;
constexpr double confluence_budget = 120.0;
constexpr double large_budget = 60.0;

// Path preservation is counted over every contraction of criteria 2, 4 and 5.
struct PathTally {
  std::atomic<std::size_t> checked{0};
  std::atomic<std::size_t> failed{0};

  void record(const WfNet& before, const WfNet& after, const SubnetSelection& s,
              const NodeId& fresh) {
    ++checked;
    try {
      if (!path_quotient_check(before, after, s, fresh)) ++failed;
    } catch (const std::exception&) {
      ++failed;
    }
  }
  std::function<void(const ContractionEvent&)> hook() {
    return [this](const ContractionEvent& e) {
      record(e.before, e.after, e.found.subnet.members, e.fresh);
    };
  }
};

PathTally paths;

struct Outcome {
  bool pass = true;
  std::string detail;

  void fail(const std::string& why) {
    if (pass) detail = why;
    pass = false;
  }
  void expect(bool ok, const std::string& why) {
    if (!ok) fail(why);
  }
};

int failures = 0;

void report(int id, const char* title, const std::function<Outcome()>& body) {
  const auto start = Clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o.fail(std::string("exception: ") + e.what());
  }
  const double secs = std::chrono::duration<double>(Clock::now() - start).count();
  if (!o.pass) ++failures;
  std::printf("%s %2d %-34s %8.3f s  %s\n", o.pass ? "PASS" : "FAIL", id, title, secs,
              o.detail.c_str());
  std::fflush(stdout);
}

double since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

int cli(std::vector<std::string> args) {
  args.insert(args.begin(), "wfnet");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  return cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
}

std::string fixture_path(const std::string& name) { return t::data_dir() + "/" + name + ".net"; }

Outcome classification() {
  Outcome o;
  const auto start = Clock::now();
  auto classes = [](const char* name) { return classify(t::fixture(name)); };
  o.expect(classes("fig4_pAND").basic_classes() == ClassSet{BasicClass::pand}, "fig4_pAND");
  auto tand = classes("fig4_11tAND");
  o.expect(tand.basic_classes() == ClassSet{BasicClass::tand11} && tand.one_input &&
               tand.one_output,
           "fig4_11tAND");
  o.expect(classes("fig4_11pOR").basic_classes() == ClassSet{BasicClass::por11}, "fig4_11pOR");
  o.expect(classes("fig4_tOR").basic_classes() == ClassSet{BasicClass::tor}, "fig4_tOR");
  for (const char* name : {"fig3_tAND", "fig3_pOR"}) {
    auto l = classes(name);
    o.expect(l.basic_classes().empty(), std::string(name) + " is basic");
    o.expect(!l.one_input || !l.one_output, std::string(name) + " is not multi-I/O");
  }
  o.expect(since(start) < classify_budget, "over time budget");
  return o;
}

Outcome verification() {
  Outcome o;
  auto timed = [&](const char* name, auto&& body) {
    const auto start = Clock::now();
    body();
    o.expect(since(start) < verify_budget, std::string(name) + " over time budget");
  };
  timed("fig5_example", [&] {
    ReduceOptions opts;
    opts.on_contraction = paths.hook();
    auto r = reduce(t::fixture("fig5_example"), opts);
    o.expect(r.net.size() == 1 && r.net.place_count() == 1, "fig5 does not reduce to a place");
    o.expect(cli({"verify-andor", fixture_path("fig5_example")}) == exit_ok, "fig5 exit code");
  });
  for (const char* name : {"fig3_tAND", "fig3_pOR"}) {
    timed(name, [&] {
      ReduceOptions opts;
      opts.on_contraction = paths.hook();
      auto r = reduce(t::fixture(name), opts);
      o.expect(r.net.size() > 1, std::string(name) + " reduces to one node");
      o.expect(cli({"verify-andor", fixture_path(name)}) == exit_negative,
               std::string(name) + " exit code");
    });
  }
  return o;
}

// The witness replays to `reached`, and a complete exploration from `stuck`
// never meets the final marking.
bool witness_holds(const WfNet& net, Marking::Count k, const Witness& w) {
  const auto subject = soundness_subject(net);
  auto reached = t::replay(subject, k, w.firing_sequence);
  if (!reached || *reached != w.reached) return false;
  if (w.removed_output_sets >= k) return false;
  const auto outputs = subject.output_ids();
  if (w.reached - Marking::uniform(outputs, w.removed_output_sets) != w.stuck) return false;
  const auto goal = Marking::uniform(outputs, k - w.removed_output_sets);
  auto graph = explore_reachable(subject, w.stuck);
  if (!graph.complete) return false;
  for (const auto& m : graph.markings)
    if (m == goal) return false;
  return true;
}

Outcome soundness() {
  Outcome o;
  for (const char* name : {"fig3_tAND", "fig3_pOR"}) {
    auto net = t::fixture(name);
    auto v = check_k_sound(net, 1);
    o.expect(v.status == Verdict::unsound, std::string(name) + " not unsound");
    o.expect(v.witness && witness_holds(net, 1, *v.witness),
             std::string(name) + " witness does not replay");
  }
  ExplorationBounds bounds;
  bounds.max_states = 100'000;
  for (const char* name : {"fig4_pAND", "fig4_11tAND", "fig4_11pOR", "fig4_tOR"}) {
    auto r = check_star_sound_bounded(t::fixture(name), 3, bounds);
    o.expect(r.summary == Verdict::sound && r.per_k.size() == 3, std::string(name) + " not sound");
    for (const auto& [k, v] : r.per_k)
      o.expect(v.status == Verdict::sound && v.states_explored <= bounds.max_states,
               std::string(name) + " at k=" + std::to_string(k));
  }
  return o;
}

Outcome confluence() {
  Outcome o;
  const auto start = Clock::now();
  const std::vector<OrderPolicy> policies = {OrderPolicy::lexicographic(), OrderPolicy::reverse(),
                                             OrderPolicy::shuffled(1), OrderPolicy::shuffled(2),
                                             OrderPolicy::shuffled(3)};
  std::mutex lock;
  std::atomic<std::uint64_t> next{1};
  std::atomic<std::size_t> largest{0};
  auto work = [&] {
    for (std::uint64_t seed = next++; seed <= 200; seed = next++) {
      const std::size_t steps = 3 + seed % 28;
      const auto io = seed % 2 ? IoType::place : IoType::transition;
      // m + steps * (m - 1) <= 100 bounds the net size.
      const std::size_t basic = (100 + steps) / (steps + 1);
      auto g = generate_and_or_net({seed, steps, basic, io});
      std::string problem;
      for (auto seen = largest.load(); seen < g.net.size();)
        largest.compare_exchange_weak(seen, g.net.size());
      if (g.net.size() > 100) problem = "net over 100 nodes";
      std::vector<WfNet> results;
      for (const auto& policy : policies) {
        ReduceOptions opts;
        opts.policy = policy;
        opts.on_contraction = paths.hook();
        results.push_back(reduce(g.net, opts).net);
        if (results.back().size() != 1) problem = policy.to_string() + " leaves several nodes";
      }
      for (std::size_t a = 0; a < results.size(); ++a)
        for (std::size_t b = a + 1; b < results.size(); ++b)
          if (!isomorphic(results[a], results[b])) problem = "results not isomorphic";
      if (!problem.empty()) {
        std::lock_guard guard(lock);
        o.fail("seed " + std::to_string(seed) + ": " + problem);
      }
    }
  };
  const unsigned n = std::max(1u, std::min(4u, std::thread::hardware_concurrency()));
  std::vector<std::thread> pool;
  for (unsigned i = 0; i < n; ++i) pool.emplace_back(work);
  for (auto& th : pool) th.join();
  if (o.pass) o.detail = "largest net " + std::to_string(largest.load()) + " nodes";
  o.expect(since(start) < confluence_budget, "over time budget");
  return o;
}

Outcome round_trip() {
  Outcome o;
  Rng rng(2024);
  for (int i = 0; i < 100; ++i) {
    const auto io = rng.chance(50) ? IoType::place : IoType::transition;
    auto host = generate_and_or_net({rng.below(1'000'000) + 1, rng.below(8), 4, io}).net;
    const auto nodes = host.node_ids();
    const NodeId n = nodes[rng.below(nodes.size())];
    const bool place = host.is_place(host.index_of(n));
    const auto kind = place ? (rng.chance(50) ? BasicClass::pand : BasicClass::por11)
                            : (rng.chance(50) ? BasicClass::tand11 : BasicClass::tor);
    IdSource ids("inner");
    auto inner = generate_basic_net(kind, 1 + rng.below(8), rng, ids);
    auto grown = substitute(host, n, inner);
    const auto inner_ids = inner.node_ids();
    const SubnetSelection image(inner_ids.begin(), inner_ids.end());
    auto back = contract(grown, image, n);
    paths.record(grown, back, image, n);
    if (back != host) o.fail("case " + std::to_string(i) + " differs from its host");
  }
  return o;
}

Outcome commutativity() {
  Outcome o;
  auto line = NetBuilder()
                  .place("pi").transition("ta").place("p1").transition("t1").place("p2")
                  .transition("t2").place("p3").transition("tb").place("po")
                  .arc("pi", "ta").arc("ta", "p1").arc("p1", "t1").arc("t1", "p2")
                  .arc("p2", "t2").arc("t2", "p3").arc("p3", "tb").arc("tb", "po")
                  .input("pi").output("po").build();
  struct Case {
    const char* name;
    SubnetSelection s1, s2;
    OverlapCase expected;
  };
  const std::vector<Case> cases = {
      {"A", {"p1", "t1", "p2"}, {"t2", "p3", "tb"}, OverlapCase::disjoint},
      {"B", {"p1", "t1", "p2"}, {"t1", "p2", "t2"}, OverlapCase::overlapping_different_types},
      {"C", {"p1", "t1", "p2"}, {"p2", "t2", "p3"}, OverlapCase::overlapping_same_type},
      {"D", {"p1", "t1", "p2", "t2", "p3"}, {"t1", "p2", "t2"}, OverlapCase::nested},
  };
  for (const auto& c : cases) {
    o.expect(contractible_classes(line, c.s1) && contractible_classes(line, c.s2),
             std::string("case ") + c.name + " selection not contractible");
    auto r = check_commutation(line, c.s1, c.s2, "n1", "n2", "n3");
    o.expect(r.overlap == c.expected, std::string("case ") + c.name + " misclassified");
    o.expect(r.commutes(), std::string("case ") + c.name + ": " + r.failure);
  }
  return o;
}

Outcome path_preservation() {
  Outcome o;
  o.detail = std::to_string(paths.checked.load()) + " contractions";
  o.expect(paths.checked > 0, "no contractions recorded");
  o.expect(paths.failed == 0, std::to_string(paths.failed.load()) + " contractions lose a path");
  return o;
}

Outcome brute_force() {
  Outcome o;
  Rng rng(77);
  t::AndOrOracle oracle;
  int disagreements = 0, positive = 0;
  for (int i = 0; i < 500; ++i) {
    auto net = t::random_small_net(rng, 10, i % 3);
    if (net.size() > 10) {
      o.fail("net over 10 nodes");
      continue;
    }
    const bool expected = oracle.is_and_or(t::small_net(net));
    positive += expected;
    if (is_and_or(net) != expected) ++disagreements;
  }
  o.detail = std::to_string(positive) + " of 500 AND-OR";
  o.expect(disagreements == 0, std::to_string(disagreements) + " disagreements");
  return o;
}

Outcome large_net() {
  Outcome o;
  auto g = generate_and_or_net({7, 1000, 8, IoType::place});
  o.detail = std::to_string(g.net.size()) + " nodes";
  o.expect(g.net.size() >= 2000, "net under 2000 nodes");
  const auto start = Clock::now();
  auto r = reduce(g.net);
  o.expect(r.net.size() == 1, "does not reduce to one node");
  o.expect(since(start) < large_budget, "over time budget");
  return o;
}

Outcome formats() {
  Outcome o;
  auto check = [&](const WfNet& net, const std::string& what) {
    const auto text = serialize_net(net);
    auto back = validate_or_throw(parse_native(text));
    o.expect(back == net, what + " does not round-trip");
    o.expect(serialize_net(back) == text && serialize_net(net) == text,
             what + " serialization not stable");
  };
  for (const auto& name : t::fixture_names()) check(t::fixture(name), name);
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    GenerationRecipe recipe{seed, seed % 20, 5, seed % 3 ? IoType::place : IoType::transition};
    auto a = generate_and_or_net(recipe).net;
    check(a, "generated seed " + std::to_string(seed));
    o.expect(serialize_net(generate_and_or_net(recipe).net) == serialize_net(a),
             "regenerated seed " + std::to_string(seed) + " serializes differently");
  }
  return o;
}

}  // namespace

int main() {
  report(1, "fixture classification", classification);
  report(2, "AND-OR verification", verification);
  report(3, "soundness oracle", soundness);
  report(4, "confluence up to isomorphism", confluence);
  report(5, "substitution round trip", round_trip);
  report(6, "commutativity cases A-D", commutativity);
  report(7, "path preservation", path_preservation);
  report(8, "brute-force equivalence", brute_force);
  report(9, "large net reduction", large_net);
  report(10, "format round trip", formats);
  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
