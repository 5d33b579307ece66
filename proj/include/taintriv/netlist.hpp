#ifndef TAINTRIV_NETLIST_HPP
#define TAINTRIV_NETLIST_HPP

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace taintriv {

enum class GateType { And, Or, Nand, Nor, Xor, Xnor, Not, Buf, Dff };

inline const char* gate_type_name(GateType t) {
  switch (t) {
    case GateType::And: return "AND";
    case GateType::Or: return "OR";
    case GateType::Nand: return "NAND";
    case GateType::Nor: return "NOR";
    case GateType::Xor: return "XOR";
    case GateType::Xnor: return "XNOR";
    case GateType::Not: return "NOT";
    case GateType::Buf: return "BUF";
    case GateType::Dff: return "DFF";
  }
  return "?";
}

struct BenchError : std::runtime_error {
  enum class Kind {
    Syntax,
    UndrivenNet,
    MultipleDrivers,
    CombinationalCycle,
    UnknownGateType,
    UnknownNet,
    ArityMismatch,
  };
  Kind kind;
  std::string net;

  BenchError(Kind k, const std::string& n, const std::string& msg)
      : std::runtime_error(msg), kind(k), net(n) {}
};

// Gate-level netlist with dense net ids. Combinational gates carry a
// topological evaluation order; cycles are legal only through DFFs.
struct Netlist {
  struct Gate {
    int out = -1;
    GateType type = GateType::Buf;
    std::vector<int> ins;
    int level = 0;  // 0 for gates fed only by inputs/DFF outputs +1 deep
  };

  std::string name;
  std::vector<std::string> nets;  // id -> name
  std::unordered_map<std::string, int> net_ids;
  std::vector<int> inputs;   // net ids, declaration order
  std::vector<int> outputs;  // net ids, declaration order
  std::vector<Gate> gates;
  std::vector<int> topo;    // combinational gate indices in evaluation order
  std::vector<int> dffs;    // DFF gate indices, declaration order
  std::vector<int> driver;  // net id -> driving gate index, -1 for inputs

  int intern(const std::string& n) {
    auto it = net_ids.find(n);
    if (it != net_ids.end()) return it->second;
    const int id = static_cast<int>(nets.size());
    nets.push_back(n);
    net_ids.emplace(n, id);
    return id;
  }

  int net_id(const std::string& n) const {
    auto it = net_ids.find(n);
    if (it == net_ids.end())
      throw BenchError(BenchError::Kind::UnknownNet, n, "unknown net '" + n + "'");
    return it->second;
  }

  bool is_input(int id) const {
    return std::find(inputs.begin(), inputs.end(), id) != inputs.end();
  }

  // Validates drivers and arities, orders the combinational gates, and
  // assigns levels. Throws BenchError on structural problems.
  void finalize() {
    driver.assign(nets.size(), -1);
    for (size_t g = 0; g < gates.size(); ++g) {
      const int out = gates[g].out;
      if (driver[out] != -1)
        throw BenchError(BenchError::Kind::MultipleDrivers, nets[out],
                         "net '" + nets[out] + "' has multiple drivers");
      driver[out] = static_cast<int>(g);
    }
    for (int in : inputs)
      if (driver[in] != -1)
        throw BenchError(BenchError::Kind::MultipleDrivers, nets[in],
                         "primary input '" + nets[in] + "' is also driven by a gate");

    for (const auto& g : gates) {
      const size_t arity = g.ins.size();
      const bool unary = g.type == GateType::Not || g.type == GateType::Buf ||
                         g.type == GateType::Dff;
      if ((unary && arity != 1) || (!unary && arity < 2))
        throw BenchError(BenchError::Kind::ArityMismatch, nets[g.out],
                         "gate '" + nets[g.out] + "' has arity " + std::to_string(arity));
      for (int in : g.ins)
        if (driver[in] == -1 && !is_input(in))
          throw BenchError(BenchError::Kind::UndrivenNet, nets[in],
                           "net '" + nets[in] + "' is never driven");
    }
    for (int out : outputs)
      if (driver[out] == -1 && !is_input(out))
        throw BenchError(BenchError::Kind::UndrivenNet, nets[out],
                         "output '" + nets[out] + "' is never driven");

    dffs.clear();
    for (size_t g = 0; g < gates.size(); ++g)
      if (gates[g].type == GateType::Dff) dffs.push_back(static_cast<int>(g));

    // Iterative DFS from every combinational gate; DFF outputs are
    // sources, so edges into them stop the walk.
    topo.clear();
    std::vector<int> state(gates.size(), 0);  // 0 unvisited, 1 on stack, 2 done
    std::vector<std::pair<int, size_t>> stack;
    for (size_t root = 0; root < gates.size(); ++root) {
      if (gates[root].type == GateType::Dff || state[root] != 0) continue;
      stack.emplace_back(static_cast<int>(root), 0);
      state[root] = 1;
      while (!stack.empty()) {
        auto& [g, next] = stack.back();
        if (next < gates[g].ins.size()) {
          const int dep = driver[gates[g].ins[next++]];
          if (dep < 0 || gates[dep].type == GateType::Dff) continue;
          if (state[dep] == 1)
            throw BenchError(BenchError::Kind::CombinationalCycle, nets[gates[dep].out],
                             "combinational cycle through net '" + nets[gates[dep].out] + "'");
          if (state[dep] == 0) {
            state[dep] = 1;
            stack.emplace_back(dep, 0);
          }
        } else {
          state[g] = 2;
          topo.push_back(g);
          stack.pop_back();
        }
      }
    }

    std::vector<int> net_level(nets.size(), 0);
    for (int g : topo) {
      int lvl = 0;
      for (int in : gates[g].ins) lvl = std::max(lvl, net_level[in]);
      gates[g].level = lvl + 1;
      net_level[gates[g].out] = lvl + 1;
    }
    for (int g : dffs) gates[g].level = 0;
  }
};

namespace detail {

inline std::string bench_trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline GateType bench_gate_type(std::string t, const std::string& net) {
  std::transform(t.begin(), t.end(), t.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  if (t == "AND") return GateType::And;
  if (t == "OR") return GateType::Or;
  if (t == "NAND") return GateType::Nand;
  if (t == "NOR") return GateType::Nor;
  if (t == "XOR") return GateType::Xor;
  if (t == "XNOR") return GateType::Xnor;
  if (t == "NOT" || t == "INV") return GateType::Not;
  if (t == "BUF" || t == "BUFF") return GateType::Buf;
  if (t == "DFF") return GateType::Dff;
  throw BenchError(BenchError::Kind::UnknownGateType, net,
                   "unknown gate type '" + t + "' driving net '" + net + "'");
}

}  // namespace detail

// ISCAS-85/89 .bench reader: INPUT(n), OUTPUT(n), n = GATE(a, b, ...),
// '#' comments.
inline Netlist parse_bench(const std::string& text, const std::string& name = "") {
  using detail::bench_trim;
  Netlist nl;
  nl.name = name;

  std::istringstream lines(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(lines, raw)) {
    ++lineno;
    const std::string line = bench_trim(raw.substr(0, raw.find('#')));
    if (line.empty()) continue;
    auto syntax = [&](const std::string& what) {
      return BenchError(BenchError::Kind::Syntax, "",
                        "line " + std::to_string(lineno) + ": " + what);
    };

    const size_t eq = line.find('=');
    if (eq == std::string::npos) {
      const size_t open = line.find('(');
      const size_t close = line.rfind(')');
      if (open == std::string::npos || close == std::string::npos || close != line.size() - 1)
        throw syntax("expected INPUT(n), OUTPUT(n) or n = GATE(...)");
      const std::string kw = bench_trim(line.substr(0, open));
      const std::string net = bench_trim(line.substr(open + 1, close - open - 1));
      if (net.empty()) throw syntax("empty net name");
      if (kw == "INPUT")
        nl.inputs.push_back(nl.intern(net));
      else if (kw == "OUTPUT")
        nl.outputs.push_back(nl.intern(net));
      else
        throw syntax("unknown directive '" + kw + "'");
      continue;
    }

    const std::string out = bench_trim(line.substr(0, eq));
    const std::string rhs = bench_trim(line.substr(eq + 1));
    const size_t open = rhs.find('(');
    const size_t close = rhs.rfind(')');
    if (out.empty() || open == std::string::npos || close == std::string::npos ||
        close != rhs.size() - 1)
      throw syntax("expected n = GATE(a, b, ...)");
    const std::string type = bench_trim(rhs.substr(0, open));

    Netlist::Gate g;
    g.type = detail::bench_gate_type(type, out);
    g.out = nl.intern(out);
    std::string arg;
    std::istringstream args(rhs.substr(open + 1, close - open - 1));
    while (std::getline(args, arg, ',')) {
      const std::string in = bench_trim(arg);
      if (in.empty()) throw syntax("empty operand in gate '" + out + "'");
      g.ins.push_back(nl.intern(in));
    }
    if (g.ins.empty()) throw syntax("gate '" + out + "' has no operands");
    nl.gates.push_back(std::move(g));
  }

  nl.finalize();
  return nl;
}

}  // namespace taintriv

#endif  // TAINTRIV_NETLIST_HPP
