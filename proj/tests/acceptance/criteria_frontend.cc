#include <exception>
#include <map>
#include <spdlog/fmt/fmt.h>
#include <string>
#include <vector>

#include "criteria.h"
#include "structrtl/cdfg/analysis.h"
#include "structrtl/cdfg/serialize.h"
#include "structrtl/data/dataset.h"
#include "structrtl/rtl/elaborate.h"
#include "structrtl/rtl/parser.h"

namespace structrtl::acceptance {
namespace {

// Kahn's algorithm on the graph with every edge into or out of a Reg
// removed; true when all non-Reg nodes drain.
bool CutGraphAcyclic(const cdfg::Cdfg& g) {
  const int n = g.num_nodes();
  std::vector<std::vector<int>> succ(n);
  std::vector<int> indeg(n, 0);
  int remaining = 0;
  for (int v = 0; v < n; ++v) remaining += g.node(v).type != cdfg::NodeType::kReg;
  for (const cdfg::Edge& e : g.edges()) {
    if (g.node(e.src).type == cdfg::NodeType::kReg || g.node(e.dst).type == cdfg::NodeType::kReg) continue;
    succ[e.src].push_back(e.dst);
    ++indeg[e.dst];
  }
  std::vector<int> ready;
  for (int v = 0; v < n; ++v) {
    if (g.node(v).type != cdfg::NodeType::kReg && indeg[v] == 0) ready.push_back(v);
  }
  while (!ready.empty()) {
    const int v = ready.back();
    ready.pop_back();
    --remaining;
    for (int w : succ[v]) {
      if (--indeg[w] == 0) ready.push_back(w);
    }
  }
  return remaining == 0;
}

}  // namespace

Outcome FrontendCorpus() {
  constexpr int kDesigns = 1000;
  const std::vector<std::string> sources = data::GenerateSources(kDesigns, 20240501);
  std::map<std::string, int> failures;
  std::string first_failure;
  long long nodes = 0;
  auto fail = [&](const std::string& kind, int i, const std::string& what) {
    if (failures[kind]++ == 0 && first_failure.empty()) first_failure = fmt::format("design {}: {} {}", i, kind, what);
  };
  for (int i = 0; i < kDesigns; ++i) {
    try {
      const rtl::AstModule ast = rtl::ParseModule(sources[i]);
      const cdfg::Cdfg g = rtl::Elaborate(ast);
      nodes += g.num_nodes();
      const std::vector<cdfg::Violation> violations = cdfg::Validate(g);
      if (!violations.empty()) fail("validate", i, violations.front().kind + ": " + violations.front().detail);
      for (int v = 0; v < g.num_nodes(); ++v) {
        const int code = cdfg::Code(g.node(v).type);
        if (code < 0 || code >= cdfg::kNumNodeTypes) {
          fail("node type", i, std::to_string(code));
          break;
        }
      }
      if (!CutGraphAcyclic(g)) fail("reg-cut cycle", i, "");
      // Serialization round trip, and elaboration is deterministic down to
      // the serialized bytes.
      const std::string json = cdfg::ToJson(g);
      if (cdfg::ToJson(rtl::CompileVerilog(sources[i])) != json) fail("nondeterministic elaboration", i, "");
      if (cdfg::ToJson(cdfg::FromJson(json)) != json) fail("cdfg json round trip", i, "");
    } catch (const std::exception& e) {
      fail("exception", i, e.what());
    }
  }
  int total = 0;
  std::string summary;
  for (const auto& [kind, count] : failures) {
    total += count;
    summary += fmt::format("; {} x{}", kind, count);
  }
  return {total == 0,
          fmt::format("{} designs (mean {:.1f} nodes, {} node types available): {} failures{}{}", kDesigns,
                      static_cast<double>(nodes) / kDesigns, cdfg::kNumNodeTypes, total, summary,
                      first_failure.empty() ? "" : "; first: " + first_failure)};
}

}  // namespace structrtl::acceptance
