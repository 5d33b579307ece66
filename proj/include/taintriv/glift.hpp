#ifndef TAINTRIV_GLIFT_HPP
#define TAINTRIV_GLIFT_HPP

#include <algorithm>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "taintriv/netlist.hpp"
#include "taintriv/report.hpp"

namespace taintriv {

// Per-net (value, taint) pair for one simulation, indexed by net id.
struct TaintVector {
  std::vector<uint8_t> value;
  std::vector<uint8_t> taint;

  bool value_of(const Netlist& nl, const std::string& net) const {
    return value[nl.net_id(net)] != 0;
  }
  bool taint_of(const Netlist& nl, const std::string& net) const {
    return taint[nl.net_id(net)] != 0;
  }
};

// (value, taint) per DFF, in Netlist::dffs order.
struct DffState {
  std::vector<uint8_t> value;
  std::vector<uint8_t> taint;

  static DffState zeros(const Netlist& nl) {
    DffState s;
    s.value.assign(nl.dffs.size(), 0);
    s.taint.assign(nl.dffs.size(), 0);
    return s;
  }
};

namespace detail {

struct VT {
  bool v;
  bool t;
};

// Two-input shadow closed forms: the output is tainted exactly when the
// tainted inputs can change it with the untainted inputs held fixed.
inline VT and2(VT a, VT b) {
  return {a.v && b.v, (a.t && b.v) || (b.t && a.v) || (a.t && b.t)};
}
inline VT or2(VT a, VT b) {
  return {a.v || b.v, (a.t && !b.v) || (b.t && !a.v) || (a.t && b.t)};
}
inline VT xor2(VT a, VT b) { return {a.v != b.v, a.t || b.t}; }

// Balanced 2-input tree over [lo, hi); keeps the shadow library to the
// two-input closed forms for n-ary .bench gates.
template <typename Leaf, typename Op>
VT fold_tree(size_t lo, size_t hi, Leaf leaf, Op op) {
  if (hi - lo == 1) return leaf(lo);
  const size_t mid = lo + (hi - lo) / 2;
  return op(fold_tree(lo, mid, leaf, op), fold_tree(mid, hi, leaf, op));
}

}  // namespace detail

// Shadow logic for one gate: boolean output value plus the precise
// influence taint bit.
inline std::pair<bool, bool> gate_taint(GateType type,
                                        const std::vector<uint8_t>& in_values,
                                        const std::vector<uint8_t>& in_taints) {
  using detail::VT;
  const size_t n = in_values.size();
  if (in_taints.size() != n)
    throw std::invalid_argument("gate_taint: value/taint arity mismatch");
  const bool unary = type == GateType::Not || type == GateType::Buf || type == GateType::Dff;
  if ((unary && n != 1) || (!unary && n < 2))
    throw std::invalid_argument("gate_taint: arity does not match gate type");

  auto leaf = [&](size_t i) { return VT{in_values[i] != 0, in_taints[i] != 0}; };
  VT r{};
  switch (type) {
    case GateType::Not:
    case GateType::Buf:
    case GateType::Dff:
      r = leaf(0);
      if (type == GateType::Not) r.v = !r.v;
      return {r.v, r.t};
    case GateType::And:
    case GateType::Nand:
      r = detail::fold_tree(0, n, leaf, detail::and2);
      if (type == GateType::Nand) r.v = !r.v;
      return {r.v, r.t};
    case GateType::Or:
    case GateType::Nor:
      r = detail::fold_tree(0, n, leaf, detail::or2);
      if (type == GateType::Nor) r.v = !r.v;
      return {r.v, r.t};
    case GateType::Xor:
    case GateType::Xnor:
      r = detail::fold_tree(0, n, leaf, detail::xor2);
      if (type == GateType::Xnor) r.v = !r.v;
      return {r.v, r.t};
  }
  throw std::invalid_argument("gate_taint: unknown gate type");
}

// Evaluates every net's (value, taint) in topological order. One value
// and one taint bit per primary input; DFF state defaults to 0/untainted.
inline TaintVector simulate_ift(const Netlist& nl, const std::vector<uint8_t>& input_values,
                                const std::vector<uint8_t>& input_taints,
                                const DffState* state = nullptr) {
  if (input_values.size() != nl.inputs.size() || input_taints.size() != nl.inputs.size())
    throw std::invalid_argument("simulate_ift: missing input assignment");
  if (state && (state->value.size() != nl.dffs.size() || state->taint.size() != nl.dffs.size()))
    throw std::invalid_argument("simulate_ift: DFF state arity mismatch");

  TaintVector tv;
  tv.value.assign(nl.nets.size(), 0);
  tv.taint.assign(nl.nets.size(), 0);
  for (size_t i = 0; i < nl.inputs.size(); ++i) {
    tv.value[nl.inputs[i]] = input_values[i] ? 1 : 0;
    tv.taint[nl.inputs[i]] = input_taints[i] ? 1 : 0;
  }
  for (size_t d = 0; d < nl.dffs.size(); ++d) {
    const int out = nl.gates[nl.dffs[d]].out;
    tv.value[out] = state ? state->value[d] : 0;
    tv.taint[out] = state ? state->taint[d] : 0;
  }

  std::vector<uint8_t> vals, taints;
  for (int g : nl.topo) {
    const auto& gate = nl.gates[g];
    vals.clear();
    taints.clear();
    for (int in : gate.ins) {
      vals.push_back(tv.value[in]);
      taints.push_back(tv.taint[in]);
    }
    const auto [v, t] = gate_taint(gate.type, vals, taints);
    tv.value[gate.out] = v ? 1 : 0;
    tv.taint[gate.out] = t ? 1 : 0;
  }
  return tv;
}

// Plain boolean evaluation, values only. This is the reference path the
// influence oracle runs on; it never touches the shadow forms.
inline std::vector<uint8_t> plain_eval(const Netlist& nl,
                                       const std::vector<uint8_t>& input_values,
                                       const DffState* state = nullptr) {
  if (input_values.size() != nl.inputs.size())
    throw std::invalid_argument("plain_eval: missing input assignment");
  std::vector<uint8_t> v(nl.nets.size(), 0);
  for (size_t i = 0; i < nl.inputs.size(); ++i) v[nl.inputs[i]] = input_values[i] ? 1 : 0;
  for (size_t d = 0; d < nl.dffs.size(); ++d)
    v[nl.gates[nl.dffs[d]].out] = state ? state->value[d] : 0;

  for (int g : nl.topo) {
    const auto& gate = nl.gates[g];
    bool r = false;
    switch (gate.type) {
      case GateType::And:
      case GateType::Nand: {
        r = true;
        for (int in : gate.ins) r = r && v[in];
        if (gate.type == GateType::Nand) r = !r;
        break;
      }
      case GateType::Or:
      case GateType::Nor: {
        for (int in : gate.ins) r = r || v[in];
        if (gate.type == GateType::Nor) r = !r;
        break;
      }
      case GateType::Xor:
      case GateType::Xnor: {
        for (int in : gate.ins) r = r != (v[in] != 0);
        if (gate.type == GateType::Xnor) r = !r;
        break;
      }
      case GateType::Not:
        r = !v[gate.ins[0]];
        break;
      case GateType::Buf:
      case GateType::Dff:
        r = v[gate.ins[0]] != 0;
        break;
    }
    v[gate.out] = r ? 1 : 0;
  }
  return v;
}

inline constexpr size_t kOracleMaxTainted = 20;

// Ground truth for the taint semantics: 1 iff two assignments to the
// tainted inputs (untainted inputs held at their given values) produce
// different values on output_net under plain boolean simulation.
inline bool oracle_influence(const Netlist& nl, const std::string& output_net,
                             const std::vector<uint8_t>& input_values,
                             const std::vector<std::string>& tainted_inputs) {
  const int out = nl.net_id(output_net);
  std::vector<size_t> positions;
  for (const auto& name : tainted_inputs) {
    const int id = nl.net_id(name);
    const auto it = std::find(nl.inputs.begin(), nl.inputs.end(), id);
    if (it == nl.inputs.end())
      throw std::invalid_argument("oracle_influence: '" + name + "' is not a primary input");
    positions.push_back(static_cast<size_t>(it - nl.inputs.begin()));
  }
  if (positions.size() > kOracleMaxTainted)
    throw std::invalid_argument("oracle_influence: enumeration bound exceeded");

  std::vector<uint8_t> vals = input_values;
  bool first = true;
  bool ref = false;
  for (uint64_t m = 0; m < (uint64_t{1} << positions.size()); ++m) {
    for (size_t b = 0; b < positions.size(); ++b)
      vals[positions[b]] = (m >> b) & 1 ? 1 : 0;
    const bool o = plain_eval(nl, vals)[out] != 0;
    if (first) {
      ref = o;
      first = false;
    } else if (o != ref) {
      return true;
    }
  }
  return false;
}

// Transitive fan-in of the target nets. Cut points (primary inputs and
// DFF outputs) become the submodule's primary inputs; targets become its
// outputs. The extracted module is purely combinational.
inline Netlist extract_cone(const Netlist& nl, const std::vector<std::string>& target_nets) {
  std::vector<int> targets;
  for (const auto& t : target_nets) targets.push_back(nl.net_id(t));

  std::vector<uint8_t> net_seen(nl.nets.size(), 0);
  std::vector<uint8_t> gate_keep(nl.gates.size(), 0);
  std::vector<int> work = targets;
  while (!work.empty()) {
    const int n = work.back();
    work.pop_back();
    if (net_seen[n]) continue;
    net_seen[n] = 1;
    const int g = nl.driver[n];
    if (g < 0 || nl.gates[g].type == GateType::Dff) continue;  // cut here
    gate_keep[g] = 1;
    for (int in : nl.gates[g].ins) work.push_back(in);
  }

  Netlist sub;
  sub.name = nl.name.empty() ? "cone" : nl.name + ".cone";
  // original primary inputs first, then DFF cut nets, declaration order
  for (int in : nl.inputs)
    if (net_seen[in]) sub.inputs.push_back(sub.intern(nl.nets[in]));
  for (int d : nl.dffs) {
    const int q = nl.gates[d].out;
    if (net_seen[q]) sub.inputs.push_back(sub.intern(nl.nets[q]));
  }
  for (int t : targets) sub.outputs.push_back(sub.intern(nl.nets[t]));
  for (size_t g = 0; g < nl.gates.size(); ++g) {
    if (!gate_keep[g]) continue;
    Netlist::Gate ng;
    ng.type = nl.gates[g].type;
    ng.out = sub.intern(nl.nets[nl.gates[g].out]);
    for (int in : nl.gates[g].ins) ng.ins.push_back(sub.intern(nl.nets[in]));
    sub.gates.push_back(std::move(ng));
  }
  sub.finalize();
  return sub;
}

// Combinational evaluation with DFF outputs as pseudo-inputs; the next
// state latches each DFF's data input, so taint persists across cycles
// until untainted data overwrites it.
inline std::pair<DffState, TaintVector> step_sequential(const Netlist& nl, const DffState& state,
                                                        const std::vector<uint8_t>& input_values,
                                                        const std::vector<uint8_t>& input_taints) {
  if (state.value.size() != nl.dffs.size() || state.taint.size() != nl.dffs.size())
    throw std::invalid_argument("step_sequential: state arity mismatch");
  TaintVector tv = simulate_ift(nl, input_values, input_taints, &state);
  DffState next;
  for (int d : nl.dffs) {
    const int data = nl.gates[d].ins[0];
    next.value.push_back(tv.value[data]);
    next.taint.push_back(tv.taint[data]);
  }
  return {std::move(next), std::move(tv)};
}

enum class PolicyKind { Integrity, Confidentiality };

struct FlowPolicy {
  PolicyKind kind = PolicyKind::Integrity;
  std::vector<std::string> labeled_inputs;    // untrusted sources or secrets
  std::vector<std::string> observed_outputs;  // empty = all primary outputs
};

// Input vectors for check_flow_policy. Exhaustive mode enumerates the
// unlabeled inputs (labeled inputs held at 0); explicit vectors assign
// every primary input in declaration order.
struct VectorSource {
  enum class Mode { List, Exhaustive, Random };
  Mode mode = Mode::Exhaustive;
  std::vector<std::vector<uint8_t>> vectors;  // List
  uint64_t count = 0;                         // Random
  uint32_t seed = 0;                          // Random

  static VectorSource exhaustive() { return {Mode::Exhaustive, {}, 0, 0}; }
  static VectorSource random(uint64_t count, uint32_t seed) {
    return {Mode::Random, {}, count, seed};
  }
  static VectorSource list(std::vector<std::vector<uint8_t>> v) {
    return {Mode::List, std::move(v), 0, 0};
  }
};

inline constexpr size_t kExhaustiveMaxInputs = 20;

// Taints the labeled inputs, simulates every vector, and reports which
// observed outputs saw tainted data plus the set of gates whose output
// went tainted — the topologically first one is singled out as the
// untrusted-gate hit.
inline AnalysisReport check_flow_policy(const Netlist& nl, const FlowPolicy& policy,
                                        const VectorSource& source) {
  AnalysisReport rpt;
  rpt.mode = AnalysisReport::Mode::Glift;
  rpt.netlist_name = nl.name;
  for (int in : nl.inputs) rpt.netlist_inputs.push_back(nl.nets[in]);
  for (int out : nl.outputs) rpt.netlist_outputs.push_back(nl.nets[out]);
  rpt.netlist_gates = nl.gates.size();
  rpt.policy_kind = policy.kind == PolicyKind::Integrity ? "integrity" : "confidentiality";
  rpt.labeled_inputs = policy.labeled_inputs;

  std::vector<uint8_t> taints(nl.inputs.size(), 0);
  for (const auto& name : policy.labeled_inputs) {
    const int id = nl.net_id(name);
    const auto it = std::find(nl.inputs.begin(), nl.inputs.end(), id);
    if (it == nl.inputs.end())
      throw std::invalid_argument("labeled net '" + name + "' is not a primary input");
    taints[it - nl.inputs.begin()] = 1;
  }

  std::vector<int> observed;
  if (policy.observed_outputs.empty()) {
    observed = nl.outputs;
    for (int out : nl.outputs) rpt.observed_outputs.push_back(nl.nets[out]);
  } else {
    for (const auto& name : policy.observed_outputs) {
      observed.push_back(nl.net_id(name));
      rpt.observed_outputs.push_back(name);
    }
  }

  // unlabeled input positions, declaration order (exhaustive indexing)
  std::vector<size_t> free_positions;
  for (size_t i = 0; i < nl.inputs.size(); ++i)
    if (!taints[i]) free_positions.push_back(i);

  uint64_t total = 0;
  std::mt19937 rng(0);
  switch (source.mode) {
    case VectorSource::Mode::List:
      if (source.vectors.empty()) throw std::invalid_argument("empty vector list");
      for (const auto& v : source.vectors)
        if (v.size() != nl.inputs.size())
          throw std::invalid_argument("vector width does not match input count");
      total = source.vectors.size();
      break;
    case VectorSource::Mode::Exhaustive:
      if (free_positions.size() > kExhaustiveMaxInputs)
        throw std::invalid_argument("exhaustive enumeration bound exceeded (" +
                                    std::to_string(free_positions.size()) + " > " +
                                    std::to_string(kExhaustiveMaxInputs) + " inputs)");
      total = uint64_t{1} << free_positions.size();
      break;
    case VectorSource::Mode::Random:
      if (source.count == 0) throw std::invalid_argument("empty vector list");
      total = source.count;
      rng.seed(source.seed);
      break;
  }

  std::vector<uint8_t> gate_tainted(nl.gates.size(), 0);
  std::vector<uint8_t> values(nl.inputs.size(), 0);
  for (uint64_t idx = 0; idx < total; ++idx) {
    switch (source.mode) {
      case VectorSource::Mode::List:
        values = source.vectors[idx];
        break;
      case VectorSource::Mode::Exhaustive:
        std::fill(values.begin(), values.end(), 0);
        for (size_t b = 0; b < free_positions.size(); ++b)
          values[free_positions[b]] = (idx >> b) & 1 ? 1 : 0;
        break;
      case VectorSource::Mode::Random:
        for (auto& v : values) v = static_cast<uint8_t>(rng() & 1);
        break;
    }
    const TaintVector tv = simulate_ift(nl, values, taints);
    GliftViolation viol;
    viol.vector_index = idx;
    for (int out : observed)
      if (tv.taint[out]) viol.tainted_outputs.push_back(nl.nets[out]);
    if (!viol.tainted_outputs.empty()) rpt.violations.push_back(std::move(viol));
    for (size_t g = 0; g < nl.gates.size(); ++g)
      if (tv.taint[nl.gates[g].out]) gate_tainted[g] = 1;
  }

  // topological order: shallow levels first, declaration order within
  std::vector<size_t> tainted_gates;
  for (size_t g = 0; g < nl.gates.size(); ++g)
    if (gate_tainted[g]) tainted_gates.push_back(g);
  std::stable_sort(tainted_gates.begin(), tainted_gates.end(), [&](size_t a, size_t b) {
    return nl.gates[a].level < nl.gates[b].level;
  });
  for (size_t g : tainted_gates)
    rpt.untrusted_gates.push_back(
        {nl.nets[nl.gates[g].out], gate_type_name(nl.gates[g].type), nl.gates[g].level});
  if (!rpt.untrusted_gates.empty()) rpt.first_untrusted_gate = rpt.untrusted_gates.front().net;

  rpt.vectors_evaluated = total;
  rpt.status = rpt.violations.empty() ? ReportStatus::Clean : ReportStatus::Violation;
  rpt.summary.violations = rpt.violations.size();
  rpt.summary.untrusted_gates = rpt.untrusted_gates.size();
  return rpt;
}

}  // namespace taintriv

#endif  // TAINTRIV_GLIFT_HPP
