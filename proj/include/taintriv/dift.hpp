#ifndef TAINTRIV_DIFT_HPP
#define TAINTRIV_DIFT_HPP

#include <algorithm>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "taintriv/isa.hpp"

namespace taintriv {

// 1-bit tags over registers plus a sparse word-granular tag cache.
// Membership in mem_tags is the tag bit; absent word means tag 0.
struct TagState {
  std::array<uint8_t, 32> reg_tags{};
  std::set<uint32_t> mem_tags;       // word-aligned addresses with tag 1
  std::set<uint32_t> protected_set;  // addresses registered by SDTCHECK

  static uint32_t word_of(uint32_t addr) { return addr & ~3u; }

  bool mem_tag(uint32_t addr) const { return mem_tags.count(word_of(addr)) != 0; }

  void set_mem_tag(uint32_t addr, bool tag) {
    if (tag)
      mem_tags.insert(word_of(addr));
    else
      mem_tags.erase(word_of(addr));
  }

  bool reg_tag(unsigned r) const { return reg_tags[r] != 0; }

  void set_reg_tag(unsigned r, bool tag) {
    if (r != 0) reg_tags[r] = tag ? 1 : 0;
  }
};

struct TaintSource {
  enum class Kind { EcallRead, AddressRange };
  Kind kind = Kind::EcallRead;
  uint32_t lo = 0;  // AddressRange only, word-aligned, [lo, hi)
  uint32_t hi = 0;

  bool operator==(const TaintSource&) const = default;
};

struct PolicyConfig {
  std::vector<TaintSource> taint_sources;
  bool trap_on_tainted_jump_target = false;
  bool warn_on_tainted_branch = false;
  bool ift_enabled = true;

  // User-supplied input is the untrusted channel by default.
  static PolicyConfig defaults() {
    PolicyConfig p;
    p.taint_sources.push_back({TaintSource::Kind::EcallRead, 0, 0});
    return p;
  }

  bool ecall_read_tainted() const {
    for (const auto& s : taint_sources)
      if (s.kind == TaintSource::Kind::EcallRead) return true;
    return false;
  }

  // Ranges must be word-aligned and pairwise non-overlapping.
  std::optional<std::string> validate() const;
};

struct TagEvent {
  enum class Kind { SourceMarked, Propagated, ProtectedStore, Mismatch, TaintedBranchWarn };
  Kind kind = Kind::Propagated;
  uint32_t pc = 0;
  uint32_t addr = 0;  // memory address involved, 0 when none
  uint8_t tag = 0;

  bool operator==(const TagEvent&) const = default;
};

inline const char* tag_event_name(TagEvent::Kind k) {
  switch (k) {
    case TagEvent::Kind::SourceMarked: return "source_marked";
    case TagEvent::Kind::Propagated: return "propagated";
    case TagEvent::Kind::ProtectedStore: return "protected_store";
    case TagEvent::Kind::Mismatch: return "mismatch";
    case TagEvent::Kind::TaintedBranchWarn: return "tainted_branch_warn";
  }
  return "?";
}

inline std::optional<std::string> PolicyConfig::validate() const {
  std::vector<std::pair<uint32_t, uint32_t>> ranges;
  for (const auto& s : taint_sources) {
    if (s.kind != TaintSource::Kind::AddressRange) continue;
    if (s.lo % 4 != 0 || s.hi % 4 != 0) return "taint source range is not word-aligned";
    if (s.lo > s.hi) return "taint source range has lo > hi";
    ranges.emplace_back(s.lo, s.hi);
  }
  std::sort(ranges.begin(), ranges.end());
  for (size_t i = 1; i < ranges.size(); ++i)
    if (ranges[i].first < ranges[i - 1].second) return "taint source ranges overlap";
  return std::nullopt;
}

// Tag rule table for the standard (non-custom) instructions, evaluated
// against the pre-writeback register file so rd == rs aliases read old
// tags. Returns the policy trap to raise instead of executing, if any.
inline std::optional<TrapCause> propagate_tags(const Instruction& in, const CpuState& st,
                                               TagState& tags, const PolicyConfig& policy,
                                               std::vector<TagEvent>& events) {
  auto note_reg = [&](unsigned rd, bool tag) {
    if (rd != 0 && tags.reg_tag(rd) != tag)
      events.push_back({TagEvent::Kind::Propagated, st.pc, 0, static_cast<uint8_t>(tag)});
    tags.set_reg_tag(rd, tag);
  };

  switch (in.kind) {
    case InstrKind::Add:
    case InstrKind::Sub:
    case InstrKind::Sll:
    case InstrKind::Slt:
    case InstrKind::Sltu:
    case InstrKind::Xor:
    case InstrKind::Srl:
    case InstrKind::Sra:
    case InstrKind::Or:
    case InstrKind::And:
      note_reg(in.rd, tags.reg_tag(in.rs1) || tags.reg_tag(in.rs2));
      break;

    case InstrKind::Addi:
    case InstrKind::Slti:
    case InstrKind::Sltiu:
    case InstrKind::Xori:
    case InstrKind::Ori:
    case InstrKind::Andi:
    case InstrKind::Slli:
    case InstrKind::Srli:
    case InstrKind::Srai:
      note_reg(in.rd, tags.reg_tag(in.rs1));
      break;

    case InstrKind::Lui:
    case InstrKind::Auipc:
      note_reg(in.rd, false);
      break;

    case InstrKind::Lb:
    case InstrKind::Lh:
    case InstrKind::Lw:
    case InstrKind::Lbu:
    case InstrKind::Lhu: {
      const uint32_t addr = st.regs[in.rs1] + static_cast<uint32_t>(in.imm);
      note_reg(in.rd, tags.mem_tag(addr) || tags.reg_tag(in.rs1));
      break;
    }

    case InstrKind::Sb:
    case InstrKind::Sh:
    case InstrKind::Sw: {
      const uint32_t addr = st.regs[in.rs1] + static_cast<uint32_t>(in.imm);
      const bool old = tags.mem_tag(addr);
      // A full-word store replaces the word's tag; a sub-word store can
      // only add taint, since the rest of the word survives.
      const bool tag = in.kind == InstrKind::Sw ? tags.reg_tag(in.rs2)
                                                : (old || tags.reg_tag(in.rs2));
      tags.set_mem_tag(addr, tag);
      if (tag != old)
        events.push_back({TagEvent::Kind::Propagated, st.pc, TagState::word_of(addr),
                          static_cast<uint8_t>(tag)});
      break;
    }

    case InstrKind::Jal:
      note_reg(in.rd, false);
      break;

    case InstrKind::Jalr: {
      if (policy.trap_on_tainted_jump_target && tags.reg_tag(in.rs1)) {
        const uint32_t target = (st.regs[in.rs1] + static_cast<uint32_t>(in.imm)) & ~1u;
        events.push_back({TagEvent::Kind::Mismatch, st.pc, target, 1});
        return TrapCause{TrapCause::Cause::TagMismatch, target};
      }
      note_reg(in.rd, false);
      break;
    }

    case InstrKind::Beq:
    case InstrKind::Bne:
    case InstrKind::Blt:
    case InstrKind::Bge:
    case InstrKind::Bltu:
    case InstrKind::Bgeu:
      if (policy.warn_on_tainted_branch &&
          (tags.reg_tag(in.rs1) || tags.reg_tag(in.rs2)))
        events.push_back({TagEvent::Kind::TaintedBranchWarn, st.pc,
                          st.pc + static_cast<uint32_t>(in.imm), 1});
      break;

    case InstrKind::Csrrw:
    case InstrKind::Csrrs:
      // CSR values are machine state, not user data.
      note_reg(in.rd, false);
      break;

    default:
      break;
  }
  return std::nullopt;
}

// SDTCHECK rs2, imm(rs1): store a word and record its tag in the tag
// cache; the address joins the protected set.
inline void exec_sdtcheck(const Instruction& in, CpuState& st, TagState& tags,
                          const PolicyConfig& policy, std::vector<TagEvent>& events) {
  const uint32_t addr = st.regs[in.rs1] + static_cast<uint32_t>(in.imm);
  if (addr % 4 != 0) {
    st.fault(TrapCause::Cause::MisalignedAccess, addr);
    return;
  }
  if (!st.in_mem(addr, 4)) {
    st.fault(TrapCause::Cause::MemFault, addr);
    return;
  }
  st.store32(addr, st.regs[in.rs2]);
  if (policy.ift_enabled) {
    const bool tag = tags.reg_tag(in.rs2);
    tags.set_mem_tag(addr, tag);
    tags.protected_set.insert(addr);
    events.push_back({TagEvent::Kind::ProtectedStore, st.pc, addr, static_cast<uint8_t>(tag)});
  }
  st.pc += 4;
}

// LDTCHECK rd, imm(rs1): load a word only if its tag is clean; a set tag
// latches the mismatch CSRs and raises the exception, rd untouched.
inline void exec_ldtcheck(const Instruction& in, CpuState& st, TagState& tags,
                          const PolicyConfig& policy, std::vector<TagEvent>& events) {
  const uint32_t addr = st.regs[in.rs1] + static_cast<uint32_t>(in.imm);
  if (addr % 4 != 0) {
    st.fault(TrapCause::Cause::MisalignedAccess, addr);
    return;
  }
  if (!st.in_mem(addr, 4)) {
    st.fault(TrapCause::Cause::MemFault, addr);
    return;
  }
  if (policy.ift_enabled && tags.mem_tag(addr)) {
    st.csr_write(kCsrTagStatus, st.csr_read(kCsrTagStatus) | 1u);
    st.csr_write(kCsrTagAddr, addr);
    events.push_back({TagEvent::Kind::Mismatch, st.pc, addr, 1});
    st.fault(TrapCause::Cause::TagMismatch, addr);
    return;
  }
  if (in.rd != 0) st.regs[in.rd] = st.load32(addr);
  if (policy.ift_enabled) tags.set_reg_tag(in.rd, false);  // checked data is validated
  st.pc += 4;
}

// Marks every word in [lo, hi) as untrusted. Returns false when the
// range falls outside the memory image.
inline bool mark_tainted_region(TagState& tags, uint32_t lo, uint32_t hi, size_t mem_size,
                                std::vector<TagEvent>* events = nullptr, uint32_t pc = 0) {
  if (lo % 4 != 0 || hi % 4 != 0 || lo > hi) return false;
  if (static_cast<uint64_t>(hi) > mem_size) return false;
  for (uint32_t a = lo; a < hi; a += 4) {
    tags.mem_tags.insert(a);
    if (events) events->push_back({TagEvent::Kind::SourceMarked, pc, a, 1});
  }
  return true;
}

// ECALL read service (a7 == 5, a0 = buf, a1 = len): copies scripted
// input bytes into memory, tainting every touched word when the policy
// lists the read channel as a source. a0 gets the byte count, untainted.
inline std::optional<TrapCause> host_read_tainted(CpuState& st, TagState& tags,
                                                  const PolicyConfig& policy,
                                                  const std::vector<uint8_t>& script,
                                                  size_t& cursor,
                                                  std::vector<TagEvent>& events) {
  const uint32_t buf = st.regs[kRegA0];
  const uint32_t len = st.regs[kRegA1];
  if (!st.in_mem(buf, len)) return TrapCause{TrapCause::Cause::MemFault, buf};

  const size_t avail = script.size() > cursor ? script.size() - cursor : 0;
  const uint32_t n = static_cast<uint32_t>(std::min<uint64_t>(len, avail));
  const bool taint = policy.ift_enabled && policy.ecall_read_tainted();
  for (uint32_t i = 0; i < n; ++i) {
    st.mem[buf + i] = script[cursor + i];
    if (taint && tags.mem_tags.insert(TagState::word_of(buf + i)).second)
      events.push_back({TagEvent::Kind::SourceMarked, st.pc, TagState::word_of(buf + i), 1});
  }
  cursor += n;
  st.regs[kRegA0] = n;
  if (policy.ift_enabled) tags.set_reg_tag(kRegA0, false);
  return std::nullopt;
}

}  // namespace taintriv

#endif  // TAINTRIV_DIFT_HPP
