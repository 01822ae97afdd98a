#include "wfnet/io.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <sstream>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include "json.hpp"

namespace wfnet {

namespace {

using nlohmann::json;

std::string quoted(const std::string& s) { return json(s).dump(); }

std::pair<std::size_t, std::size_t> line_and_column(std::string_view text, std::size_t offset) {
  offset = std::min(offset, text.size());
  std::size_t line = 1, column = 1;
  for (std::size_t i = 0; i < offset; ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

std::vector<std::string> string_list(const json& doc, const char* key, bool required) {
  if (!doc.contains(key)) {
    if (required) throw ParseError(std::string("missing field \"") + key + "\"");
    return {};
  }
  const auto& v = doc.at(key);
  if (!v.is_array()) throw ParseError(std::string("field \"") + key + "\" must be a list");
  std::vector<std::string> out;
  for (const auto& e : v) {
    if (!e.is_string())
      throw ParseError(std::string("field \"") + key + "\" must contain only strings");
    out.push_back(e.get<std::string>());
  }
  return out;
}

std::string list_line(const std::set<NodeId>& ids) {
  std::string s = "[";
  bool first = true;
  for (const auto& id : ids) {
    if (!first) s += ", ";
    first = false;
    s += quoted(id.str());
  }
  return s + "]";
}

json tree_to_json(const RefinementTree& t) {
  json classes = json::array();
  for (auto c : t.classes) classes.push_back(std::string(to_string(c)));
  json children = json::array();
  for (const auto& c : t.children) children.push_back(tree_to_json(c));
  return {{"node", t.node.str()}, {"classes", classes}, {"children", children}};
}

RefinementTree tree_from_json(const json& j) {
  if (!j.is_object() || !j.contains("node") || !j.at("node").is_string())
    throw ParseError("tree node must be an object with a string \"node\"");
  RefinementTree t{NodeId(j.at("node").get<std::string>()), {}, {}};
  if (j.contains("classes")) {
    for (const auto& c : j.at("classes")) {
      if (!c.is_string()) throw ParseError("tree classes must be strings");
      try {
        t.classes.insert(basic_class_from_string(c.get<std::string>()));
      } catch (const std::invalid_argument& e) {
        throw ParseError(e.what());
      }
    }
  }
  if (j.contains("children"))
    for (const auto& c : j.at("children")) t.children.push_back(tree_from_json(c));
  return t;
}

void tree_dot(const RefinementTree& t, std::string& out) {
  std::string label = t.node.str();
  if (!t.is_leaf()) {
    label += "\\n{";
    bool first = true;
    for (auto c : t.classes) {
      label += (first ? "" : ", ") + std::string(to_string(c));
      first = false;
    }
    label += "}";
  }
  out += "  " + quoted(t.node.str()) + " [label=\"" + label + "\", shape=" +
         (t.is_leaf() ? "plaintext" : "ellipse") + "];\n";
  for (const auto& c : t.children) {
    tree_dot(c, out);
    out += "  " + quoted(t.node.str()) + " -> " + quoted(c.node.str()) + ";\n";
  }
}

namespace pt = boost::property_tree;

struct PnmlReader {
  IoNet net;
  std::vector<Arc> arcs;
  std::set<NodeId> declared_inputs, declared_outputs;
  bool annotated = false;
  std::map<std::string, std::size_t> ignored;

  void declare(std::set<NodeId>& kind_set, const pt::ptree& node, const char* what) {
    auto id = node.get_optional<std::string>("<xmlattr>.id");
    if (!id) throw ParseError(std::string("PNML ") + what + " without id");
    NodeId nid(*id);
    if (net.graph.places.count(nid) || net.graph.transitions.count(nid))
      throw ParseError("duplicate id '" + *id + "'");
    kind_set.insert(nid);
    for (const auto& [tag, child] : node)
      if (tag != "<xmlattr>") ++ignored[tag];
  }

  void read_toolspecific(const pt::ptree& node) {
    if (node.get("<xmlattr>.tool", "") != "wfnet") {
      ++ignored["toolspecific"];
      return;
    }
    annotated = true;
    for (const auto& [tag, child] : node) {
      if (tag == "input" || tag == "output") {
        auto ref = child.get_optional<std::string>("<xmlattr>.ref");
        if (!ref) throw ParseError("wfnet " + tag + " entry without ref");
        (tag == "input" ? declared_inputs : declared_outputs).insert(NodeId(*ref));
      } else if (tag != "<xmlattr>") {
        ++ignored[tag];
      }
    }
  }

  void read_container(const pt::ptree& node) {
    for (const auto& [tag, child] : node) {
      if (tag == "place") {
        declare(net.graph.places, child, "place");
      } else if (tag == "transition") {
        declare(net.graph.transitions, child, "transition");
      } else if (tag == "arc") {
        auto src = child.get_optional<std::string>("<xmlattr>.source");
        auto tgt = child.get_optional<std::string>("<xmlattr>.target");
        if (!src || !tgt) throw ParseError("PNML arc without source or target");
        arcs.push_back({NodeId(*src), NodeId(*tgt)});
        for (const auto& [t, c] : child)
          if (t != "<xmlattr>") ++ignored[t];
      } else if (tag == "page") {
        read_container(child);
      } else if (tag == "toolspecific") {
        read_toolspecific(child);
      } else if (tag != "<xmlattr>") {
        ++ignored[tag];
      }
    }
  }
};

}  // namespace

ParseError::ParseError(const std::string& what, std::size_t line, std::size_t column)
    : std::runtime_error(line ? what + " (line " + std::to_string(line) + ", column " +
                                    std::to_string(column) + ")"
                              : what),
      line_(line),
      column_(column) {}

NetFormat format_for_path(const std::filesystem::path& path) {
  auto ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) {
    return static_cast<char>(std::tolower(c));
  });
  return ext == ".pnml" ? NetFormat::pnml : NetFormat::native;
}

IoNet parse_native(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    auto [line, column] = line_and_column(text, e.byte == 0 ? 0 : e.byte - 1);
    std::string msg = e.what();
    if (auto pos = msg.find("syntax error"); pos != std::string::npos) msg = msg.substr(pos);
    throw ParseError(msg, line, column);
  }
  if (!doc.is_object()) throw ParseError("net document must be an object");
  static const std::set<std::string> known{"arcs",   "inputs", "name",
                                           "outputs", "places", "transitions"};
  for (auto it = doc.begin(); it != doc.end(); ++it)
    if (!known.count(it.key())) throw ParseError("unknown field \"" + it.key() + "\"");
  if (doc.contains("name") && !doc.at("name").is_string())
    throw ParseError("field \"name\" must be a string");

  IoNet net;
  for (const auto& [key, target] :
       {std::pair{"places", &net.graph.places}, std::pair{"transitions", &net.graph.transitions}}) {
    for (const auto& id : string_list(doc, key, true)) {
      if (net.graph.places.count(id) || net.graph.transitions.count(id))
        throw ParseError("duplicate id '" + id + "'");
      target->insert(NodeId(id));
    }
  }
  if (!doc.contains("arcs")) throw ParseError("missing field \"arcs\"");
  if (!doc.at("arcs").is_array()) throw ParseError("field \"arcs\" must be a list");
  for (const auto& a : doc.at("arcs")) {
    if (!a.is_array() || a.size() != 2 || !a[0].is_string() || !a[1].is_string())
      throw ParseError("each arc must be a [source, target] pair of ids");
    Arc arc{NodeId(a[0].get<std::string>()), NodeId(a[1].get<std::string>())};
    for (const auto& end : {arc.source, arc.target})
      if (!net.graph.places.count(end) && !net.graph.transitions.count(end))
        throw ParseError("arc [" + arc.source.str() + ", " + arc.target.str() +
                         "] references undeclared id '" + end.str() + "'");
    if (!net.graph.arcs.insert(arc).second)
      net.warnings.push_back("duplicate arc [" + arc.source.str() + ", " + arc.target.str() +
                             "] ignored");
  }
  for (const auto& [key, target] :
       {std::pair{"inputs", &net.inputs}, std::pair{"outputs", &net.outputs}}) {
    for (const auto& id : string_list(doc, key, true))
      if (!target->insert(NodeId(id)).second)
        net.warnings.push_back("duplicate entry '" + id + "' in " + key + " ignored");
  }
  return net;
}

IoNet parse_pnml(std::string_view text) {
  pt::ptree tree;
  try {
    std::istringstream in{std::string(text)};
    pt::read_xml(in, tree);
  } catch (const pt::xml_parser_error& e) {
    throw ParseError("XML error: " + e.message(), e.line(), e.line() ? 1 : 0);
  }
  const auto pnml = tree.get_child_optional("pnml");
  if (!pnml) throw ParseError("not a PNML document (no <pnml> root)");
  PnmlReader reader;
  bool found = false;
  for (const auto& [tag, child] : *pnml) {
    if (tag != "net") continue;
    if (found) {
      ++reader.ignored["net"];
      continue;
    }
    found = true;
    reader.read_container(child);
  }
  if (!found) throw ParseError("PNML document contains no <net>");

  IoNet& net = reader.net;
  std::set<NodeId> has_producer, has_consumer;
  for (const auto& arc : reader.arcs) {
    for (const auto& end : {arc.source, arc.target})
      if (!net.graph.places.count(end) && !net.graph.transitions.count(end))
        throw ParseError("arc [" + arc.source.str() + ", " + arc.target.str() +
                         "] references undeclared id '" + end.str() + "'");
    if (!net.graph.arcs.insert(arc).second)
      net.warnings.push_back("duplicate arc [" + arc.source.str() + ", " + arc.target.str() +
                             "] ignored");
    has_consumer.insert(arc.source);
    has_producer.insert(arc.target);
  }
  if (reader.annotated) {
    net.inputs = reader.declared_inputs;
    net.outputs = reader.declared_outputs;
  } else {
    for (const auto& p : net.graph.places) {
      if (!has_producer.count(p)) net.inputs.insert(p);
      if (!has_consumer.count(p)) net.outputs.insert(p);
    }
  }
  for (const auto& [tag, count] : reader.ignored)
    net.warnings.push_back("ignored PNML element <" + tag + "> (" + std::to_string(count) +
                           "x)");
  return net;
}

IoNet parse_net(std::string_view text, NetFormat format) {
  return format == NetFormat::pnml ? parse_pnml(text) : parse_native(text);
}

std::string serialize_net(const WfNet& net) {
  const IoNet io = net.to_io_net();
  std::string out = "{\n  \"arcs\": [";
  bool first = true;
  for (const auto& arc : io.graph.arcs) {
    out += first ? "\n" : ",\n";
    first = false;
    out += "    [" + quoted(arc.source.str()) + ", " + quoted(arc.target.str()) + "]";
  }
  out += first ? "],\n" : "\n  ],\n";
  out += "  \"inputs\": " + list_line(io.inputs) + ",\n";
  out += "  \"outputs\": " + list_line(io.outputs) + ",\n";
  out += "  \"places\": " + list_line(io.graph.places) + ",\n";
  out += "  \"transitions\": " + list_line(io.graph.transitions) + "\n}\n";
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw std::runtime_error("error writing '" + path.string() + "'");
}

IoNet read_net(const std::filesystem::path& path) {
  const auto text = read_file(path);
  try {
    return parse_net(text, format_for_path(path));
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

WfNet load_net(const std::filesystem::path& path) { return validate_or_throw(read_net(path)); }

std::string net_to_dot(const WfNet& net) {
  std::string out = "digraph net {\n  rankdir=LR;\n";
  for (WfNet::Index n = 0; n < net.size(); ++n)
    out += "  " + quoted(net.id(n).str()) +
           (net.is_place(n) ? " [shape=circle];\n" : " [shape=box];\n");
  for (WfNet::Index n = 0; n < net.size(); ++n) {
    const auto id = net.id(n).str();
    if (net.is_input(n))
      out += "  " + quoted("in:" + id) + " [shape=point, style=invis];\n";
    if (net.is_output(n))
      out += "  " + quoted("out:" + id) + " [shape=point, style=invis];\n";
  }
  for (const auto& arc : net.arcs())
    out += "  " + quoted(arc.source.str()) + " -> " + quoted(arc.target.str()) + ";\n";
  for (WfNet::Index n = 0; n < net.size(); ++n) {
    const auto id = net.id(n).str();
    if (net.is_input(n)) out += "  " + quoted("in:" + id) + " -> " + quoted(id) + ";\n";
    if (net.is_output(n)) out += "  " + quoted(id) + " -> " + quoted("out:" + id) + ";\n";
  }
  return out + "}\n";
}

std::string trees_to_dot(const std::vector<RefinementTree>& trees) {
  std::string out = "digraph refinement {\n";
  for (const auto& t : trees) tree_dot(t, out);
  return out + "}\n";
}

std::string serialize_trees(const std::vector<RefinementTree>& trees) {
  json doc = json::array();
  for (const auto& t : trees) doc.push_back(tree_to_json(t));
  return doc.dump(2) + "\n";
}

std::vector<RefinementTree> parse_trees(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    auto [line, column] = line_and_column(text, e.byte == 0 ? 0 : e.byte - 1);
    throw ParseError("malformed tree document", line, column);
  }
  if (!doc.is_array()) throw ParseError("tree document must be a list of trees");
  std::vector<RefinementTree> trees;
  for (const auto& t : doc) trees.push_back(tree_from_json(t));
  return trees;
}

}  // namespace wfnet
