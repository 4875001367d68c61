#include "structrtl/cdfg/serialize.h"

#include <sstream>

#include "json.hpp"
#include "structrtl/util/error.h"

namespace structrtl::cdfg {
namespace {

using nlohmann::json;

const json& Require(const json& obj, const char* key, const std::string& at) {
  auto it = obj.find(key);
  if (it == obj.end()) throw SchemaError(at + "/" + key, "missing required field");
  return *it;
}

int RequireInt(const json& obj, const char* key, const std::string& at) {
  const json& v = Require(obj, key, at);
  if (!v.is_number_integer()) throw SchemaError(at + "/" + key, "expected integer");
  return v.get<int>();
}

NodeAttrs AttrsFromJson(const json& j, const std::string& at) {
  NodeAttrs attrs;
  if (!j.is_object()) throw SchemaError(at, "expected object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string path = at + "/" + it.key();
    const json& v = it.value();
    if (it.key() == "name" || it.key() == "value" || it.key() == "clock") {
      if (!v.is_string()) throw SchemaError(path, "expected string");
      std::string s = v.get<std::string>();
      if (it.key() == "name") attrs.name = std::move(s);
      if (it.key() == "value") attrs.value = std::move(s);
      if (it.key() == "clock") attrs.clock = std::move(s);
    } else if (it.key() == "msb" || it.key() == "lsb") {
      if (!v.is_number_integer()) throw SchemaError(path, "expected integer");
      (it.key() == "msb" ? attrs.msb : attrs.lsb) = v.get<int>();
    } else {
      throw SchemaError(path, "unknown attribute");
    }
  }
  return attrs;
}

}  // namespace

std::string ToJson(const Cdfg& g) {
  json nodes = json::array();
  for (const Node& n : g.nodes()) {
    json attrs = json::object();
    if (n.attrs.name) attrs["name"] = *n.attrs.name;
    if (n.attrs.value) attrs["value"] = *n.attrs.value;
    if (n.attrs.msb) attrs["msb"] = *n.attrs.msb;
    if (n.attrs.lsb) attrs["lsb"] = *n.attrs.lsb;
    if (n.attrs.clock) attrs["clock"] = *n.attrs.clock;
    nodes.push_back({{"id", n.id},
                     {"type", std::string(Name(n.type))},
                     {"width", n.width},
                     {"attrs", std::move(attrs)}});
  }
  json edges = json::array();
  for (const Edge& e : g.edges()) {
    edges.push_back({{"src", e.src}, {"dst", e.dst}, {"op_idx", e.operand_index}});
  }
  json doc = {{"nodes", std::move(nodes)}, {"edges", std::move(edges)}};
  return doc.dump() + "\n";
}

Cdfg FromJson(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError("", std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) throw SchemaError("", "expected object");
  const json& nodes = Require(doc, "nodes", "");
  if (!nodes.is_array()) throw SchemaError("/nodes", "expected array");

  Cdfg g;
  for (size_t i = 0; i < nodes.size(); ++i) {
    const std::string at = "/nodes/" + std::to_string(i);
    const json& jn = nodes[i];
    if (!jn.is_object()) throw SchemaError(at, "expected object");
    Node n;
    n.id = RequireInt(jn, "id", at);
    const json& type = Require(jn, "type", at);
    if (!type.is_string()) throw SchemaError(at + "/type", "expected string");
    auto parsed = ParseNodeType(type.get<std::string>());
    if (!parsed) {
      throw SchemaError(at + "/type", "unknown node type '" + type.get<std::string>() + "'");
    }
    n.type = *parsed;
    n.width = RequireInt(jn, "width", at);
    if (n.width < 1) throw SchemaError(at + "/width", "width must be >= 1");
    if (auto it = jn.find("attrs"); it != jn.end()) {
      n.attrs = AttrsFromJson(*it, at + "/attrs");
    }
    g.AppendNodeUnchecked(std::move(n));
  }

  if (auto it = doc.find("edges"); it != doc.end()) {
    if (!it->is_array()) throw SchemaError("/edges", "expected array");
    for (size_t i = 0; i < it->size(); ++i) {
      const std::string at = "/edges/" + std::to_string(i);
      const json& je = (*it)[i];
      if (!je.is_object()) throw SchemaError(at, "expected object");
      Edge e;
      e.src = RequireInt(je, "src", at);
      e.dst = RequireInt(je, "dst", at);
      if (auto op = je.find("op_idx"); op != je.end()) {
        if (!op->is_number_integer()) throw SchemaError(at + "/op_idx", "expected integer");
        e.operand_index = op->get<int>();
      }
      g.AppendEdgeUnchecked(e);
    }
  }
  return g;
}

std::string ToDot(const Cdfg& g) {
  std::ostringstream out;
  out << "digraph cdfg {\n  node [shape=box, fontname=\"monospace\"];\n";
  for (const Node& n : g.nodes()) {
    out << "  n" << n.id << " [label=\"" << Name(n.type) << " [" << n.width << "]";
    if (n.attrs.name) out << "\\n" << *n.attrs.name;
    if (n.attrs.value) out << "\\n'b" << *n.attrs.value;
    if (n.attrs.msb) out << "\\n[" << *n.attrs.msb << ":" << n.attrs.lsb.value_or(*n.attrs.msb) << "]";
    out << "\"";
    if (n.type == NodeType::kReg) out << ", shape=box3d";
    if (n.type == NodeType::kInput || n.type == NodeType::kOutput) out << ", shape=ellipse";
    out << "];\n";
  }
  for (const Edge& e : g.edges()) {
    out << "  n" << e.src << " -> n" << e.dst << " [label=\"" << e.operand_index << "\"];\n";
  }
  out << "}\n";
  return out.str();
}

}  // namespace structrtl::cdfg
