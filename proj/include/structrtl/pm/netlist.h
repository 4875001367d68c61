#ifndef STRUCTRTL_PM_NETLIST_H_
#define STRUCTRTL_PM_NETLIST_H_

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "structrtl/nn/layers.h"
#include "structrtl/util/error.h"
#include "structrtl/util/matrix.h"

namespace structrtl::pm {

struct CellType {
  std::string name;
  std::vector<std::string> inputs;  // pin names; truth-table bit k of the row index is input k
  std::string output;
  std::vector<int> truth_table;     // 2^inputs entries
  double area = 0.0;
  std::vector<double> pin_delays;   // one per input pin
  bool sequential = false;

  double MaxPinDelay() const;
};

class CellLibrary {
 public:
  CellLibrary() = default;
  explicit CellLibrary(std::vector<CellType> cells);

  // INV, BUF, NAND2, NOR2, AND2, OR2, XOR2, DFF.
  static CellLibrary Default();

  const std::vector<CellType>& cells() const { return cells_; }
  int size() const { return static_cast<int>(cells_.size()); }
  // Index of `name`, or -1.
  int Find(std::string_view name) const;
  const CellType& at(std::string_view name) const;

  int max_truth_table() const { return max_truth_table_; }
  int max_fan_in() const { return max_fan_in_; }
  // one-hot + padded truth table + area + padded pin delays
  int feature_dim() const { return size() + max_truth_table_ + 1 + max_fan_in_; }

 private:
  std::vector<CellType> cells_;
  int max_truth_table_ = 0;
  int max_fan_in_ = 0;
};

// {"cells": [{"name", "inputs", "output", "truth_table", "area",
//   "pin_delays", "sequential"}]}
std::string ToJson(const CellLibrary& lib);
CellLibrary CellLibraryFromJson(std::string_view text);

class MultipleDrivers : public Error {
 public:
  explicit MultipleDrivers(const std::string& net)
      : Error("net '" + net + "' has more than one driver"), net_(net) {}
  const std::string& net() const { return net_; }

 private:
  std::string net_;
};

struct Cell {
  int id = 0;
  std::string type;
  std::map<std::string, std::string> pins;  // pin -> net
};

struct Netlist {
  std::vector<Cell> cells;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  // Driver cell index -> sink cell index, one per distinct pair, sorted.
  std::vector<std::pair<int, int>> edges;
};

// Netlist JSON: {"cells": [{"id", "type", "pins": {pin: net}}],
// "inputs": [net], "outputs": [net]}. Every net read by a cell or listed
// as an output must have exactly one driver (a cell output pin or a primary
// input).
Netlist ParseNetlist(std::string_view text, const CellLibrary& lib);
std::string ToJson(const Netlist& netlist);

// Row per cell: one_hot(type) | truth table zero-padded to the library's
// max length | area | pin delays zero-padded to the library's max fan-in.
Matrix CellFeatures(const Netlist& netlist, const CellLibrary& lib);

nn::EdgeList NetlistEdges(const Netlist& netlist);

}  // namespace structrtl::pm

#endif  // STRUCTRTL_PM_NETLIST_H_
