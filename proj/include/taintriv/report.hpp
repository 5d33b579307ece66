#ifndef TAINTRIV_REPORT_HPP
#define TAINTRIV_REPORT_HPP

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "taintriv/dift.hpp"
#include "taintriv/isa.hpp"

namespace taintriv {

inline constexpr const char* kToolVersion = "1.0.0";

enum class ReportStatus { Clean, Violation, Trap, StepLimit };

inline const char* report_status_name(ReportStatus s) {
  switch (s) {
    case ReportStatus::Clean: return "clean";
    case ReportStatus::Violation: return "violation";
    case ReportStatus::Trap: return "trap";
    case ReportStatus::StepLimit: return "step_limit";
  }
  return "?";
}

struct FinalStatus {
  std::string kind;  // "halted" | "trapped" | "running"
  uint32_t code = 0;
  std::string cause;  // trap cause name, empty otherwise
  uint32_t addr = 0;

  bool operator==(const FinalStatus&) const = default;
};

struct GliftViolation {
  uint64_t vector_index = 0;
  std::vector<std::string> tainted_outputs;

  bool operator==(const GliftViolation&) const = default;
};

struct UntrustedGate {
  std::string net;
  std::string gate_type;
  int level = 0;

  bool operator==(const UntrustedGate&) const = default;
};

struct ReportSummary {
  uint64_t steps = 0;
  uint64_t tainted_words = 0;
  uint64_t violations = 0;
  uint64_t untrusted_gates = 0;

  bool operator==(const ReportSummary&) const = default;
};

// Machine-readable outcome shared by both engines. The dift section is
// populated for simulator runs, the glift section for netlist analyses.
struct AnalysisReport {
  enum class Mode { Dift, Glift };

  std::string tool_version = kToolVersion;
  Mode mode = Mode::Dift;
  ReportStatus status = ReportStatus::Clean;
  ReportSummary summary;

  // dift
  uint64_t steps = 0;
  uint32_t final_pc = 0;
  FinalStatus final_status;
  std::vector<TagEvent> events;

  // glift
  std::string netlist_name;
  std::vector<std::string> netlist_inputs;
  std::vector<std::string> netlist_outputs;
  uint64_t netlist_gates = 0;
  std::string policy_kind;
  std::vector<std::string> labeled_inputs;
  std::vector<std::string> observed_outputs;
  uint64_t vectors_evaluated = 0;
  std::vector<GliftViolation> violations;
  std::vector<UntrustedGate> untrusted_gates;
  std::string first_untrusted_gate;

  bool operator==(const AnalysisReport&) const = default;

  // Exit codes are a function of status only.
  int exit_code() const {
    switch (status) {
      case ReportStatus::Clean: return 0;
      case ReportStatus::Violation: return 10;
      case ReportStatus::Trap: return 11;
      case ReportStatus::StepLimit: return 12;
    }
    return 11;
  }

  nlohmann::json to_json() const;
  static AnalysisReport from_json(const nlohmann::json& j);
};

inline nlohmann::json tag_event_to_json(const TagEvent& e) {
  return {{"kind", tag_event_name(e.kind)},
          {"pc", e.pc},
          {"addr", e.addr},
          {"tag", e.tag}};
}

inline TagEvent tag_event_from_json(const nlohmann::json& j) {
  TagEvent e;
  const std::string kind = j.at("kind");
  if (kind == "source_marked") e.kind = TagEvent::Kind::SourceMarked;
  else if (kind == "propagated") e.kind = TagEvent::Kind::Propagated;
  else if (kind == "protected_store") e.kind = TagEvent::Kind::ProtectedStore;
  else if (kind == "mismatch") e.kind = TagEvent::Kind::Mismatch;
  else if (kind == "tainted_branch_warn") e.kind = TagEvent::Kind::TaintedBranchWarn;
  else throw std::invalid_argument("unknown tag event kind: " + kind);
  e.pc = j.at("pc");
  e.addr = j.at("addr");
  e.tag = j.at("tag");
  return e;
}

inline nlohmann::json AnalysisReport::to_json() const {
  nlohmann::json j;
  j["tool_version"] = tool_version;
  j["mode"] = mode == Mode::Dift ? "dift" : "glift";
  j["status"] = report_status_name(status);
  j["summary"] = {{"steps", summary.steps},
                  {"tainted_words", summary.tainted_words},
                  {"violations", summary.violations},
                  {"untrusted_gates", summary.untrusted_gates}};
  if (mode == Mode::Dift) {
    nlohmann::json d;
    d["steps"] = steps;
    d["final_pc"] = final_pc;
    d["final_status"] = {{"kind", final_status.kind},
                         {"code", final_status.code},
                         {"cause", final_status.cause},
                         {"addr", final_status.addr}};
    d["events"] = nlohmann::json::array();
    for (const auto& e : events) d["events"].push_back(tag_event_to_json(e));
    j["dift"] = std::move(d);
  } else {
    nlohmann::json g;
    g["netlist"] = {{"name", netlist_name},
                    {"inputs", netlist_inputs},
                    {"outputs", netlist_outputs},
                    {"gates", netlist_gates}};
    g["policy"] = {{"kind", policy_kind},
                   {"labeled_inputs", labeled_inputs},
                   {"observed_outputs", observed_outputs}};
    g["vectors_evaluated"] = vectors_evaluated;
    g["violations"] = nlohmann::json::array();
    for (const auto& v : violations)
      g["violations"].push_back({{"vector_index", v.vector_index},
                                 {"tainted_outputs", v.tainted_outputs}});
    g["untrusted_gates"] = nlohmann::json::array();
    for (const auto& u : untrusted_gates)
      g["untrusted_gates"].push_back({{"net", u.net},
                                      {"gate_type", u.gate_type},
                                      {"level", u.level}});
    g["first_untrusted_gate"] = first_untrusted_gate;
    j["glift"] = std::move(g);
  }
  return j;
}

inline AnalysisReport AnalysisReport::from_json(const nlohmann::json& j) {
  AnalysisReport r;
  r.tool_version = j.at("tool_version");
  r.mode = j.at("mode") == "glift" ? Mode::Glift : Mode::Dift;
  const std::string st = j.at("status");
  if (st == "clean") r.status = ReportStatus::Clean;
  else if (st == "violation") r.status = ReportStatus::Violation;
  else if (st == "trap") r.status = ReportStatus::Trap;
  else if (st == "step_limit") r.status = ReportStatus::StepLimit;
  else throw std::invalid_argument("unknown report status: " + st);
  const auto& s = j.at("summary");
  r.summary = {s.at("steps"), s.at("tainted_words"), s.at("violations"),
               s.at("untrusted_gates")};
  if (r.mode == Mode::Dift) {
    const auto& d = j.at("dift");
    r.steps = d.at("steps");
    r.final_pc = d.at("final_pc");
    const auto& f = d.at("final_status");
    r.final_status = {f.at("kind"), f.at("code"), f.at("cause"), f.at("addr")};
    for (const auto& e : d.at("events")) r.events.push_back(tag_event_from_json(e));
  } else {
    const auto& g = j.at("glift");
    const auto& n = g.at("netlist");
    r.netlist_name = n.at("name");
    r.netlist_inputs = n.at("inputs").get<std::vector<std::string>>();
    r.netlist_outputs = n.at("outputs").get<std::vector<std::string>>();
    r.netlist_gates = n.at("gates");
    const auto& p = g.at("policy");
    r.policy_kind = p.at("kind");
    r.labeled_inputs = p.at("labeled_inputs").get<std::vector<std::string>>();
    r.observed_outputs = p.at("observed_outputs").get<std::vector<std::string>>();
    r.vectors_evaluated = g.at("vectors_evaluated");
    for (const auto& v : g.at("violations"))
      r.violations.push_back(
          {v.at("vector_index"), v.at("tainted_outputs").get<std::vector<std::string>>()});
    for (const auto& u : g.at("untrusted_gates"))
      r.untrusted_gates.push_back({u.at("net"), u.at("gate_type"), u.at("level")});
    r.first_untrusted_gate = g.at("first_untrusted_gate");
  }
  return r;
}

}  // namespace taintriv

#endif  // TAINTRIV_REPORT_HPP
