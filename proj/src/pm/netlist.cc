#include "structrtl/pm/netlist.h"

#include <algorithm>
#include <set>

#include "json.hpp"

namespace structrtl::pm {

using nlohmann::json;

double CellType::MaxPinDelay() const {
  return pin_delays.empty() ? 0.0 : *std::max_element(pin_delays.begin(), pin_delays.end());
}

CellLibrary::CellLibrary(std::vector<CellType> cells) : cells_(std::move(cells)) {
  for (size_t i = 0; i < cells_.size(); ++i) {
    const CellType& c = cells_[i];
    const std::string at = "/cells/" + std::to_string(i);
    if (Find(c.name) != static_cast<int>(i)) throw SchemaError(at + "/name", "duplicate cell " + c.name);
    if (!(c.area > 0)) throw SchemaError(at + "/area", "area must be positive");
    if (c.pin_delays.size() != c.inputs.size()) {
      throw SchemaError(at + "/pin_delays", "one delay per input pin expected");
    }
    if (c.truth_table.size() != (size_t{1} << c.inputs.size())) {
      throw SchemaError(at + "/truth_table", "expected 2^inputs entries");
    }
    max_truth_table_ = std::max(max_truth_table_, static_cast<int>(c.truth_table.size()));
    max_fan_in_ = std::max(max_fan_in_, static_cast<int>(c.inputs.size()));
  }
}

CellLibrary CellLibrary::Default() {
  auto gate2 = [](std::string name, std::vector<int> tt, double area, double delay) {
    return CellType{std::move(name), {"A", "B"}, "Y", std::move(tt), area, {delay, delay}, false};
  };
  return CellLibrary({
      CellType{"INV", {"A"}, "Y", {1, 0}, 1.0, {1.0}, false},
      CellType{"BUF", {"A"}, "Y", {0, 1}, 1.25, {1.2}, false},
      gate2("NAND2", {1, 1, 1, 0}, 1.25, 1.0),
      gate2("NOR2", {1, 0, 0, 0}, 1.25, 1.2),
      gate2("AND2", {0, 0, 0, 1}, 1.5, 1.4),
      gate2("OR2", {0, 1, 1, 1}, 1.5, 1.5),
      gate2("XOR2", {0, 1, 1, 0}, 2.5, 2.0),
      CellType{"DFF", {"D"}, "Q", {0, 1}, 5.0, {3.0}, true},
  });
}

int CellLibrary::Find(std::string_view name) const {
  for (size_t i = 0; i < cells_.size(); ++i) {
    if (cells_[i].name == name) return static_cast<int>(i);
  }
  return -1;
}

const CellType& CellLibrary::at(std::string_view name) const {
  const int i = Find(name);
  if (i < 0) throw SchemaError("/cells", "unknown cell type '" + std::string(name) + "'");
  return cells_[i];
}

std::string ToJson(const CellLibrary& lib) {
  json cells = json::array();
  for (const CellType& c : lib.cells()) {
    cells.push_back({{"name", c.name},
                     {"inputs", c.inputs},
                     {"output", c.output},
                     {"truth_table", c.truth_table},
                     {"area", c.area},
                     {"pin_delays", c.pin_delays},
                     {"sequential", c.sequential}});
  }
  return json{{"cells", cells}}.dump(2) + "\n";
}

namespace {

json ParseJson(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError("", e.what());
  }
}

const json& Require(const json& obj, const std::string& key, const std::string& at) {
  if (!obj.is_object() || !obj.contains(key)) throw SchemaError(at + "/" + key, "missing required field");
  return obj.at(key);
}

template <typename T>
T As(const json& v, const std::string& at) {
  try {
    return v.get<T>();
  } catch (const json::exception& e) {
    throw SchemaError(at, e.what());
  }
}

}  // namespace

CellLibrary CellLibraryFromJson(std::string_view text) {
  const json j = ParseJson(text);
  std::vector<CellType> cells;
  const json& arr = Require(j, "cells", "");
  for (size_t i = 0; i < arr.size(); ++i) {
    const std::string at = "/cells/" + std::to_string(i);
    const json& c = arr[i];
    CellType t;
    t.name = As<std::string>(Require(c, "name", at), at + "/name");
    t.inputs = As<std::vector<std::string>>(Require(c, "inputs", at), at + "/inputs");
    t.output = As<std::string>(Require(c, "output", at), at + "/output");
    t.truth_table = As<std::vector<int>>(Require(c, "truth_table", at), at + "/truth_table");
    t.area = As<double>(Require(c, "area", at), at + "/area");
    t.pin_delays = As<std::vector<double>>(Require(c, "pin_delays", at), at + "/pin_delays");
    t.sequential = c.value("sequential", false);
    cells.push_back(std::move(t));
  }
  return CellLibrary(std::move(cells));
}

Netlist ParseNetlist(std::string_view text, const CellLibrary& lib) {
  const json j = ParseJson(text);
  Netlist n;
  n.inputs = As<std::vector<std::string>>(Require(j, "inputs", ""), "/inputs");
  n.outputs = As<std::vector<std::string>>(Require(j, "outputs", ""), "/outputs");
  const json& arr = Require(j, "cells", "");

  std::map<std::string, int> driver;  // net -> cell index, -1 for primary input
  for (const std::string& net : n.inputs) {
    if (!driver.emplace(net, -1).second) throw MultipleDrivers(net);
  }
  std::set<int> ids;
  for (size_t i = 0; i < arr.size(); ++i) {
    const std::string at = "/cells/" + std::to_string(i);
    Cell c;
    c.id = As<int>(Require(arr[i], "id", at), at + "/id");
    c.type = As<std::string>(Require(arr[i], "type", at), at + "/type");
    c.pins = As<std::map<std::string, std::string>>(Require(arr[i], "pins", at), at + "/pins");
    if (!ids.insert(c.id).second) throw SchemaError(at + "/id", "duplicate cell id");
    if (lib.Find(c.type) < 0) throw SchemaError(at + "/type", "cell type '" + c.type + "' not in library");
    const CellType& t = lib.at(c.type);
    for (const auto& [pin, net] : c.pins) {
      if (pin != t.output && std::find(t.inputs.begin(), t.inputs.end(), pin) == t.inputs.end()) {
        throw SchemaError(at + "/pins/" + pin, "cell " + c.type + " has no pin " + pin);
      }
    }
    for (const std::string& pin : t.inputs) {
      if (!c.pins.contains(pin)) throw SchemaError(at + "/pins/" + pin, "unconnected input pin");
    }
    auto out = c.pins.find(t.output);
    if (out != c.pins.end() && !driver.emplace(out->second, static_cast<int>(i)).second) {
      throw MultipleDrivers(out->second);
    }
    n.cells.push_back(std::move(c));
  }

  std::set<std::pair<int, int>> edges;
  for (size_t i = 0; i < n.cells.size(); ++i) {
    const CellType& t = lib.at(n.cells[i].type);
    for (const std::string& pin : t.inputs) {
      const std::string& net = n.cells[i].pins.at(pin);
      auto d = driver.find(net);
      if (d == driver.end()) {
        throw SchemaError("/cells/" + std::to_string(i) + "/pins/" + pin, "net '" + net + "' has no driver");
      }
      if (d->second >= 0) edges.emplace(d->second, static_cast<int>(i));
    }
  }
  for (size_t k = 0; k < n.outputs.size(); ++k) {
    if (!driver.contains(n.outputs[k])) {
      throw SchemaError("/outputs/" + std::to_string(k), "output net '" + n.outputs[k] + "' has no driver");
    }
  }
  n.edges.assign(edges.begin(), edges.end());
  return n;
}

std::string ToJson(const Netlist& netlist) {
  json cells = json::array();
  for (const Cell& c : netlist.cells) cells.push_back({{"id", c.id}, {"type", c.type}, {"pins", c.pins}});
  return json{{"cells", cells}, {"inputs", netlist.inputs}, {"outputs", netlist.outputs}}.dump() + "\n";
}

Matrix CellFeatures(const Netlist& netlist, const CellLibrary& lib) {
  const int n = static_cast<int>(netlist.cells.size());
  Matrix f = Matrix::Zero(n, lib.feature_dim());
  const int tt_at = lib.size();
  const int area_at = tt_at + lib.max_truth_table();
  const int delay_at = area_at + 1;
  for (int i = 0; i < n; ++i) {
    const int type = lib.Find(netlist.cells[i].type);
    if (type < 0) throw SchemaError("/cells/" + std::to_string(i) + "/type", "not in library");
    const CellType& t = lib.cells()[type];
    f(i, type) = 1.0;
    for (size_t k = 0; k < t.truth_table.size(); ++k) f(i, tt_at + k) = t.truth_table[k];
    f(i, area_at) = t.area;
    for (size_t k = 0; k < t.pin_delays.size(); ++k) f(i, delay_at + k) = t.pin_delays[k];
  }
  return f;
}

nn::EdgeList NetlistEdges(const Netlist& netlist) {
  nn::EdgeList e;
  for (const auto& [s, d] : netlist.edges) {
    e.src.push_back(s);
    e.dst.push_back(d);
  }
  return e;
}

}  // namespace structrtl::pm
