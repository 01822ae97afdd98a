#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "wfnet/net.hpp"
#include "wfnet/refinement_tree.hpp"

namespace wfnet {

/// Malformed input document. line/column are 1-based; 0 when unknown.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line = 0, std::size_t column = 0);
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

enum class NetFormat { native, pnml };

/// pnml for *.pnml, native otherwise.
NetFormat format_for_path(const std::filesystem::path& path);

/// Native document: a JSON object with "places", "transitions", "arcs"
/// ([source, target] pairs), "inputs", "outputs" and an optional "name".
/// Duplicate arcs are dropped with a warning.
IoNet parse_native(std::string_view text);

/// Core PNML: places, transitions and arcs of the first net, pages flattened.
/// Interface nodes come from a <toolspecific tool="wfnet"> block with
/// <input ref="..."/> and <output ref="..."/> entries, or else are the places
/// without producers / consumers.
IoNet parse_pnml(std::string_view text);

IoNet parse_net(std::string_view text, NetFormat format);

/// Canonical native document: sorted keys and entries, two-space indent,
/// one arc per line, trailing newline.
std::string serialize_net(const WfNet& net);

/// Reads and validates; throws ParseError (with the file name prefixed) or
/// std::invalid_argument carrying the validation report.
WfNet load_net(const std::filesystem::path& path);
IoNet read_net(const std::filesystem::path& path);

/// Places as circles, transitions as boxes; each input gets an incoming and
/// each output an outgoing arc from/to an invisible stub node.
std::string net_to_dot(const WfNet& net);
/// Internal nodes are labeled with their class set.
std::string trees_to_dot(const std::vector<RefinementTree>& trees);

/// JSON array of {"node", "classes", "children"} objects.
std::string serialize_trees(const std::vector<RefinementTree>& trees);
std::vector<RefinementTree> parse_trees(std::string_view text);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view text);

}  // namespace wfnet
