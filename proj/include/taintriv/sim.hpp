#ifndef TAINTRIV_SIM_HPP
#define TAINTRIV_SIM_HPP

#include <cassert>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "taintriv/assembler.hpp"
#include "taintriv/dift.hpp"
#include "taintriv/isa.hpp"
#include "taintriv/report.hpp"

namespace taintriv {

// Scripted byte stream backing the ECALL read service.
struct HostIo {
  std::vector<uint8_t> script;
  size_t cursor = 0;
};

struct MemWrite {
  uint32_t addr = 0;
  uint32_t len = 0;

  bool operator==(const MemWrite&) const = default;
};

struct TraceEvent {
  uint64_t step = 0;
  uint32_t pc = 0;
  uint32_t word = 0;
  std::string text;
  std::vector<MemWrite> mem_writes;
  std::vector<TagEvent> tag_events;
};

namespace detail {

inline bool branch_taken(const Instruction& in, const CpuState& st) {
  const uint32_t a = st.regs[in.rs1];
  const uint32_t b = st.regs[in.rs2];
  switch (in.kind) {
    case InstrKind::Beq: return a == b;
    case InstrKind::Bne: return a != b;
    case InstrKind::Blt: return static_cast<int32_t>(a) < static_cast<int32_t>(b);
    case InstrKind::Bge: return static_cast<int32_t>(a) >= static_cast<int32_t>(b);
    case InstrKind::Bltu: return a < b;
    case InstrKind::Bgeu: return a >= b;
    default: return false;
  }
}

inline uint32_t alu_imm(const Instruction& in, uint32_t a) {
  const uint32_t imm = static_cast<uint32_t>(in.imm);
  switch (in.kind) {
    case InstrKind::Addi: return a + imm;
    case InstrKind::Slti: return static_cast<int32_t>(a) < in.imm ? 1 : 0;
    case InstrKind::Sltiu: return a < imm ? 1 : 0;
    case InstrKind::Xori: return a ^ imm;
    case InstrKind::Ori: return a | imm;
    case InstrKind::Andi: return a & imm;
    case InstrKind::Slli: return a << (imm & 31);
    case InstrKind::Srli: return a >> (imm & 31);
    case InstrKind::Srai: return static_cast<uint32_t>(static_cast<int32_t>(a) >> (imm & 31));
    default: return 0;
  }
}

inline uint32_t alu_reg(const Instruction& in, uint32_t a, uint32_t b) {
  switch (in.kind) {
    case InstrKind::Add: return a + b;
    case InstrKind::Sub: return a - b;
    case InstrKind::Sll: return a << (b & 31);
    case InstrKind::Slt: return static_cast<int32_t>(a) < static_cast<int32_t>(b) ? 1 : 0;
    case InstrKind::Sltu: return a < b ? 1 : 0;
    case InstrKind::Xor: return a ^ b;
    case InstrKind::Srl: return a >> (b & 31);
    case InstrKind::Sra: return static_cast<uint32_t>(static_cast<int32_t>(a) >> (b & 31));
    case InstrKind::Or: return a | b;
    case InstrKind::And: return a & b;
    default: return 0;
  }
}

inline uint32_t access_width(InstrKind k) {
  switch (k) {
    case InstrKind::Lb:
    case InstrKind::Lbu:
    case InstrKind::Sb: return 1;
    case InstrKind::Lh:
    case InstrKind::Lhu:
    case InstrKind::Sh: return 2;
    default: return 4;
  }
}

}  // namespace detail

// Executes exactly one instruction: fetch, decode, tag propagation,
// value semantics. Faults become Trapped status; pc stays on the
// offending instruction.
inline TraceEvent step(CpuState& st, TagState& tags, const PolicyConfig& policy, HostIo& io) {
  assert(st.running());
  TraceEvent ev;
  ev.pc = st.pc;

  if (st.pc % 4 != 0 || !st.in_mem(st.pc, 4)) {
    st.fault(TrapCause::Cause::InstrFault, st.pc);
    ev.text = "<fetch fault>";
    return ev;
  }
  ev.word = st.load32(st.pc);
  ev.text = disassemble(ev.word);

  const Instruction in = decode(ev.word);
  if (in.kind == InstrKind::Illegal) {
    st.fault(TrapCause::Cause::IllegalInstruction, st.pc);
    return ev;
  }

  switch (in.kind) {
    case InstrKind::Ldtcheck:
      exec_ldtcheck(in, st, tags, policy, ev.tag_events);
      break;

    case InstrKind::Sdtcheck:
      exec_sdtcheck(in, st, tags, policy, ev.tag_events);
      if (st.running()) ev.mem_writes.push_back({st.regs[in.rs1] + static_cast<uint32_t>(in.imm), 4});
      break;

    case InstrKind::Ecall:
      if (st.regs[kRegA7] == 5) {
        const uint32_t buf = st.regs[kRegA0];
        if (auto trap = host_read_tainted(st, tags, policy, io.script, io.cursor, ev.tag_events)) {
          st.fault(trap->cause, trap->addr);
        } else {
          if (st.regs[kRegA0] > 0) ev.mem_writes.push_back({buf, st.regs[kRegA0]});
          st.pc += 4;
        }
      } else {
        st.halt(st.regs[kRegA0]);
      }
      break;

    case InstrKind::Ebreak:
      st.fault(TrapCause::Cause::EnvBreak, st.pc);
      break;

    default: {
      // Memory operands are validated before any tag or state change.
      uint32_t addr = 0;
      if (is_load(in.kind) || is_store(in.kind)) {
        addr = st.regs[in.rs1] + static_cast<uint32_t>(in.imm);
        const uint32_t width = detail::access_width(in.kind);
        if (addr % width != 0) {
          st.fault(TrapCause::Cause::MisalignedAccess, addr);
          return ev;
        }
        if (!st.in_mem(addr, width)) {
          st.fault(TrapCause::Cause::MemFault, addr);
          return ev;
        }
      }

      if (policy.ift_enabled) {
        if (auto trap = propagate_tags(in, st, tags, policy, ev.tag_events)) {
          st.fault(trap->cause, trap->addr);
          return ev;
        }
      }

      switch (in.kind) {
        case InstrKind::Lui:
          if (in.rd != 0) st.regs[in.rd] = static_cast<uint32_t>(in.imm);
          st.pc += 4;
          break;
        case InstrKind::Auipc:
          if (in.rd != 0) st.regs[in.rd] = st.pc + static_cast<uint32_t>(in.imm);
          st.pc += 4;
          break;
        case InstrKind::Jal: {
          const uint32_t link = st.pc + 4;
          st.pc += static_cast<uint32_t>(in.imm);
          if (in.rd != 0) st.regs[in.rd] = link;
          break;
        }
        case InstrKind::Jalr: {
          const uint32_t link = st.pc + 4;
          st.pc = (st.regs[in.rs1] + static_cast<uint32_t>(in.imm)) & ~1u;
          if (in.rd != 0) st.regs[in.rd] = link;
          break;
        }
        case InstrKind::Beq:
        case InstrKind::Bne:
        case InstrKind::Blt:
        case InstrKind::Bge:
        case InstrKind::Bltu:
        case InstrKind::Bgeu:
          st.pc += detail::branch_taken(in, st) ? static_cast<uint32_t>(in.imm) : 4;
          break;
        case InstrKind::Lb:
          if (in.rd != 0) st.regs[in.rd] = static_cast<uint32_t>(static_cast<int8_t>(st.mem[addr]));
          st.pc += 4;
          break;
        case InstrKind::Lbu:
          if (in.rd != 0) st.regs[in.rd] = st.mem[addr];
          st.pc += 4;
          break;
        case InstrKind::Lh:
          if (in.rd != 0)
            st.regs[in.rd] = static_cast<uint32_t>(static_cast<int16_t>(st.load16(addr)));
          st.pc += 4;
          break;
        case InstrKind::Lhu:
          if (in.rd != 0) st.regs[in.rd] = st.load16(addr);
          st.pc += 4;
          break;
        case InstrKind::Lw:
          if (in.rd != 0) st.regs[in.rd] = st.load32(addr);
          st.pc += 4;
          break;
        case InstrKind::Sb:
          st.mem[addr] = static_cast<uint8_t>(st.regs[in.rs2]);
          ev.mem_writes.push_back({addr, 1});
          st.pc += 4;
          break;
        case InstrKind::Sh:
          st.store16(addr, static_cast<uint16_t>(st.regs[in.rs2]));
          ev.mem_writes.push_back({addr, 2});
          st.pc += 4;
          break;
        case InstrKind::Sw:
          st.store32(addr, st.regs[in.rs2]);
          ev.mem_writes.push_back({addr, 4});
          st.pc += 4;
          break;
        case InstrKind::Csrrw: {
          const uint32_t csr = static_cast<uint32_t>(in.imm);
          const uint32_t old = st.csr_read(csr);
          st.csr_write(csr, st.regs[in.rs1]);
          if (in.rd != 0) st.regs[in.rd] = old;
          st.pc += 4;
          break;
        }
        case InstrKind::Csrrs: {
          const uint32_t csr = static_cast<uint32_t>(in.imm);
          const uint32_t old = st.csr_read(csr);
          if (in.rs1 != 0) st.csr_write(csr, old | st.regs[in.rs1]);
          if (in.rd != 0) st.regs[in.rd] = old;
          st.pc += 4;
          break;
        }
        default:
          if (format_of(in.kind) == InstrFormat::R) {
            if (in.rd != 0)
              st.regs[in.rd] = detail::alu_reg(in, st.regs[in.rs1], st.regs[in.rs2]);
          } else {
            if (in.rd != 0) st.regs[in.rd] = detail::alu_imm(in, st.regs[in.rs1]);
          }
          st.pc += 4;
          break;
      }
    }
  }

  st.regs[0] = 0;
  tags.reg_tags[0] = 0;
  return ev;
}

// Runs until halt, trap, or the step budget is exhausted. Policy events
// (everything except per-step Propagated deltas) land in the report; the
// optional trace sink receives every step.
inline AnalysisReport run(CpuState& st, TagState& tags, const PolicyConfig& policy, HostIo& io,
                          uint64_t max_steps, std::vector<TraceEvent>* trace = nullptr) {
  if (max_steps == 0) throw std::invalid_argument("max_steps must be positive");
  AnalysisReport report;
  report.mode = AnalysisReport::Mode::Dift;

  if (policy.ift_enabled) {
    for (const auto& src : policy.taint_sources) {
      if (src.kind != TaintSource::Kind::AddressRange) continue;
      if (!mark_tainted_region(tags, src.lo, src.hi, st.mem.size(), &report.events))
        throw std::invalid_argument("taint source range outside memory image");
    }
  }

  uint64_t steps = 0;
  while (st.running() && steps < max_steps) {
    TraceEvent ev = step(st, tags, policy, io);
    ev.step = steps++;
    for (const auto& e : ev.tag_events)
      if (e.kind != TagEvent::Kind::Propagated) report.events.push_back(e);
    if (trace) trace->push_back(std::move(ev));
  }

  report.steps = steps;
  report.final_pc = st.pc;
  switch (st.status) {
    case CpuState::Status::Halted:
      report.status = ReportStatus::Clean;
      report.final_status = {"halted", st.exit_code, "", 0};
      break;
    case CpuState::Status::Trapped:
      report.status = st.trap.cause == TrapCause::Cause::TagMismatch ? ReportStatus::Violation
                                                                     : ReportStatus::Trap;
      report.final_status = {"trapped", 0, trap_cause_name(st.trap.cause), st.trap.addr};
      break;
    case CpuState::Status::Running:
      report.status = ReportStatus::StepLimit;
      report.final_status = {"running", 0, "", 0};
      break;
  }

  uint64_t mismatches = 0;
  for (const auto& e : report.events)
    if (e.kind == TagEvent::Kind::Mismatch) ++mismatches;
  report.summary.steps = steps;
  report.summary.tainted_words = tags.mem_tags.size();
  report.summary.violations = mismatches;
  return report;
}

}  // namespace taintriv

#endif  // TAINTRIV_SIM_HPP
