#include "wfnet/cli.hpp"

#include <algorithm>
#include <atomic>
#include <ostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "wfnet/andor.hpp"
#include "wfnet/io.hpp"
#include "wfnet/reduction.hpp"
#include "wfnet/soundness.hpp"

namespace wfnet {

namespace {

WfNet load(const std::string& path, std::ostream& err) {
  auto result = validate(read_net(path));
  for (const auto& w : result.report.warnings) err << "warning: " << path << ": " << w << '\n';
  if (!result.net)
    throw std::invalid_argument(path + ": not a WF net:\n" + result.report.to_string());
  return std::move(*result.net);
}

void emit(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << text;
  } else {
    write_file(path, text);
  }
}

std::string describe(const WfNet& net) {
  std::ostringstream os;
  os << (net.io_type() == IoType::place ? "pWF" : "tWF") << " net: " << net.place_count()
     << " places, " << net.transition_count() << " transitions, " << net.arc_count()
     << " arcs, " << net.inputs().size() << " inputs, " << net.outputs().size() << " outputs\n";
  return os.str();
}

struct SoundnessOptions {
  Marking::Count k = 1;
  Marking::Count max_k = 0;
  bool sub = false;
  ExplorationBounds bounds;
};

std::string join(const std::vector<NodeId>& ids) {
  std::string s;
  for (const auto& id : ids) s += (s.empty() ? "" : " ") + id.str();
  return s.empty() ? "(empty)" : s;
}

// One file's soundness report; returns the verdict and appends text to `os`.
Verdict check_file(const std::string& path, const SoundnessOptions& opt, std::ostream& os,
                   std::ostream& err) {
  const WfNet net = load(path, err);
  const WfNet subject = soundness_subject(net);
  const char* kind = opt.sub ? "substitution-sound" : "sound";
  if (net.io_type() == IoType::transition)
    os << path << ": tWF net, checking its place completion\n";
  std::vector<Marking::Count> ks;
  if (opt.max_k > 0) {
    for (Marking::Count k = 1; k <= opt.max_k; ++k) ks.push_back(k);
  } else {
    ks.push_back(opt.k);
  }
  Verdict overall = Verdict::sound;
  for (auto k : ks) {
    const auto v = opt.sub ? check_substitution_sound_bounded(net, k, opt.bounds)
                           : check_k_sound(net, k, opt.bounds);
    os << path << ": " << k << "-" << kind << ": " << to_string(v.status)
       << " (states explored: " << v.states_explored << ")\n";
    if (v.status == Verdict::inconclusive) {
      os << "  bound reached: " << v.bound_hit.value_or("unknown") << '\n';
      overall = Verdict::inconclusive;
    }
    if (v.status == Verdict::unsound) {
      const auto& w = *v.witness;
      const auto target = Marking::uniform(subject.output_ids(), k - w.removed_output_sets);
      os << "  initial marking: " << Marking::uniform(subject.input_ids(), k).to_string() << '\n'
         << "  firing sequence: " << join(w.firing_sequence) << '\n'
         << "  reached: " << w.reached.to_string() << '\n';
      if (opt.sub) os << "  removed output sets: " << w.removed_output_sets << '\n';
      os << "  " << w.stuck.to_string() << " cannot reach " << target.to_string() << '\n';
      return Verdict::unsound;
    }
  }
  return overall;
}

int verdict_code(Verdict v) {
  switch (v) {
    case Verdict::sound:
      return exit_ok;
    case Verdict::unsound:
      return exit_negative;
    case Verdict::inconclusive:
      break;
  }
  return exit_inconclusive;
}

int run_soundness(const std::vector<std::string>& files, const SoundnessOptions& opt,
                  unsigned jobs, std::ostream& out, std::ostream& err) {
  struct Result {
    std::string text, errors;
    int code = exit_ok;
  };
  std::vector<Result> results(files.size());
  auto work = [&](std::size_t i) {
    std::ostringstream os, es;
    try {
      results[i].code = verdict_code(check_file(files[i], opt, os, es));
    } catch (const std::exception& e) {
      es << "error: " << e.what() << '\n';
      results[i].code = exit_error;
    }
    results[i].text = os.str();
    results[i].errors = es.str();
  };
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  const unsigned workers = std::max(1u, std::min<unsigned>(jobs, files.size()));
  for (unsigned w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i; (i = next++) < files.size();) work(i);
    });
  for (auto& t : pool) t.join();

  // Errors outrank negative verdicts, which outrank inconclusive ones.
  int code = exit_ok;
  auto severity = [](int c) {
    switch (c) {
      case exit_error: return 3;
      case exit_negative: return 2;
      case exit_inconclusive: return 1;
      default: return 0;
    }
  };
  for (const auto& r : results) {
    out << r.text;
    err << r.errors;
    if (severity(r.code) > severity(code)) code = r.code;
  }
  return code;
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Workflow net analysis: AND-OR reduction, classification and soundness", "wfnet"};
  app.require_subcommand(1);

  std::string file, output, tree_file;
  auto* validate_cmd = app.add_subcommand("validate", "Check the WF-net conditions");
  validate_cmd->add_option("file", file, "Net file (.net or .pnml)")->required();

  auto* classify_cmd = app.add_subcommand("classify", "Print structural properties and basic classes");
  classify_cmd->add_option("file", file, "Net file")->required();

  std::optional<std::uint64_t> seed;
  auto* reduce_cmd = app.add_subcommand("reduce", "Contract basic-class subnets until none is left");
  reduce_cmd->add_option("file", file, "Net file")->required();
  reduce_cmd->add_option("--seed", seed, "Scan nodes in a seeded shuffled order");
  reduce_cmd->add_option("--tree", tree_file, "Write the refinement trees to this file");
  reduce_cmd->add_option("-o,--output", output, "Write the reduced net here instead of stdout");

  auto* verify_cmd = app.add_subcommand("verify-andor", "Decide whether the net is an AND-OR net");
  verify_cmd->add_option("file", file, "Net file")->required();

  std::vector<std::string> files;
  SoundnessOptions sopt;
  unsigned jobs = 1;
  auto* sound_cmd = app.add_subcommand("soundness", "Bounded soundness checks");
  sound_cmd->add_option("files", files, "Net files")->required();
  auto* k_opt = sound_cmd->add_option("--k", sopt.k, "Number of initial token sets (default 1)")
                    ->check(CLI::PositiveNumber);
  sound_cmd->add_option("--max-k", sopt.max_k, "Check every k from 1 to this value")
      ->check(CLI::PositiveNumber)
      ->excludes(k_opt);
  sound_cmd->add_flag("--sub", sopt.sub, "Check substitution soundness instead");
  sound_cmd->add_option("--max-states", sopt.bounds.max_states, "Exploration state limit");
  sound_cmd->add_option("--max-tokens", sopt.bounds.max_tokens, "Token limit per marking");
  sound_cmd->add_option("--jobs", jobs, "Check files in parallel")->check(CLI::PositiveNumber);

  GenerationRecipe recipe;
  std::string io_type = "place";
  auto* gen_cmd = app.add_subcommand("generate", "Generate a random AND-OR net");
  gen_cmd->add_option("--seed", recipe.seed, "Random seed (default 1)");
  gen_cmd->add_option("--steps", recipe.substitution_steps, "Substitution steps (default 0)");
  gen_cmd->add_option("--io-type", io_type, "place or transition")
      ->check(CLI::IsMember({"place", "transition"}));
  gen_cmd->add_option("--max-basic-nodes", recipe.max_basic_net_nodes,
                      "Node budget of each substituted basic net (default 4)")
      ->check(CLI::PositiveNumber);
  gen_cmd->add_option("--tree", tree_file, "Write the generation tree to this file");
  gen_cmd->add_option("-o,--output", output, "Write the net here instead of stdout");

  bool dot_tree = false;
  auto* dot_cmd = app.add_subcommand("dot", "Render a net, or its refinement trees, as DOT");
  dot_cmd->add_option("file", file, "Net file")->required();
  dot_cmd->add_flag("--tree", dot_tree, "Reduce the net and render its refinement trees");
  dot_cmd->add_option("-o,--output", output, "Write here instead of stdout");

  bool place_completion_flag = false, transition_completion_flag = false;
  auto* complete_cmd = app.add_subcommand("complete", "Add a fresh single input and output");
  complete_cmd->add_option("file", file, "Net file")->required();
  auto* place_flag = complete_cmd->add_flag("--place", place_completion_flag,
                                            "Place completion (p_i, p_o)");
  auto* transition_flag = complete_cmd->add_flag("--transition", transition_completion_flag,
                                                 "Transition completion (t_i, t_o)");
  place_flag->excludes(transition_flag);
  complete_cmd->add_option("-o,--output", output, "Write here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return exit_ok;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return exit_ok;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return exit_error;
  }

  try {
    if (*validate_cmd) {
      out << describe(load(file, err));
      return exit_ok;
    }
    if (*classify_cmd) {
      out << classify(load(file, err)).to_string();
      return exit_ok;
    }
    if (*reduce_cmd) {
      ReduceOptions options;
      if (seed) options.policy = OrderPolicy::shuffled(*seed);
      const auto result = reduce(load(file, err), options);
      if (!tree_file.empty()) write_file(tree_file, serialize_trees(result.trees));
      emit(serialize_net(result.net), output, out);
      if (!output.empty())
        out << "reduced to " << result.net.size() << " node(s) after " << result.contractions
            << " contraction(s)\n";
      return exit_ok;
    }
    if (*verify_cmd) {
      const auto result = reduce(load(file, err));
      if (result.net.size() == 1) {
        out << "AND-OR: yes\n";
        return exit_ok;
      }
      out << "AND-OR: no (irreducible net with " << result.net.size() << " nodes remains)\n";
      return exit_negative;
    }
    if (*sound_cmd) return run_soundness(files, sopt, jobs, out, err);
    if (*gen_cmd) {
      recipe.root_io_type = io_type == "transition" ? IoType::transition : IoType::place;
      const auto generated = generate_and_or_net(recipe);
      if (!tree_file.empty()) write_file(tree_file, serialize_trees({generated.tree}));
      emit(serialize_net(generated.net), output, out);
      return exit_ok;
    }
    if (*dot_cmd) {
      const WfNet net = load(file, err);
      emit(dot_tree ? trees_to_dot(reduce(net).trees) : net_to_dot(net), output, out);
      return exit_ok;
    }
    if (*complete_cmd) {
      if (!place_completion_flag && !transition_completion_flag) {
        err << "error: complete needs --place or --transition\n\n" << complete_cmd->help();
        return exit_error;
      }
      const WfNet net = load(file, err);
      emit(serialize_net(place_completion_flag ? place_completion(net)
                                               : transition_completion(net)),
           output, out);
      return exit_ok;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_error;
  }
  return exit_error;
}

}  // namespace wfnet
