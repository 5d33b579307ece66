#ifndef TAINTRIV_ISA_HPP
#define TAINTRIV_ISA_HPP

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <vector>

namespace taintriv {

// RV32I base (minus FENCE) plus CSRRW/CSRRS and the two secure
// load/store instructions.
enum class InstrKind {
  Lui, Auipc, Jal, Jalr,
  Beq, Bne, Blt, Bge, Bltu, Bgeu,
  Lb, Lh, Lw, Lbu, Lhu,
  Sb, Sh, Sw,
  Addi, Slti, Sltiu, Xori, Ori, Andi, Slli, Srli, Srai,
  Add, Sub, Sll, Slt, Sltu, Xor, Srl, Sra, Or, And,
  Ecall, Ebreak, Csrrw, Csrrs,
  Ldtcheck, Sdtcheck,
  Illegal,
};

enum class InstrFormat { R, I, S, B, U, J, Sys };

// Custom opcode assignments: LDTCHECK sits in custom-0, SDTCHECK in
// custom-1, both with funct3 010 mirroring the word-width encoding of
// LW/SW.
inline constexpr uint32_t kOpLoad    = 0x03;
inline constexpr uint32_t kOpStore   = 0x23;
inline constexpr uint32_t kOpOpImm   = 0x13;
inline constexpr uint32_t kOpOp      = 0x33;
inline constexpr uint32_t kOpLui     = 0x37;
inline constexpr uint32_t kOpAuipc   = 0x17;
inline constexpr uint32_t kOpJal     = 0x6F;
inline constexpr uint32_t kOpJalr    = 0x67;
inline constexpr uint32_t kOpBranch  = 0x63;
inline constexpr uint32_t kOpSystem  = 0x73;
inline constexpr uint32_t kOpLdtcheck = 0x0B;  // custom-0
inline constexpr uint32_t kOpSdtcheck = 0x2B;  // custom-1

// Custom CSRs in the 0x800 read/write range.
inline constexpr uint32_t kCsrTagStatus = 0x800;  // bit 0: tag exception pending
inline constexpr uint32_t kCsrTagAddr   = 0x801;  // last mismatch address

struct Instruction {
  InstrKind kind = InstrKind::Illegal;
  uint8_t opcode = 0;
  uint8_t rd = 0;
  uint8_t rs1 = 0;
  uint8_t rs2 = 0;
  uint8_t funct3 = 0;
  uint8_t funct7 = 0;
  // Sign-extended per format. CSR instructions keep the csr number here,
  // zero-extended (it is an address, not an arithmetic immediate).
  int32_t imm = 0;

  bool operator==(const Instruction&) const = default;
};

inline InstrFormat format_of(InstrKind k) {
  switch (k) {
    case InstrKind::Lui:
    case InstrKind::Auipc: return InstrFormat::U;
    case InstrKind::Jal: return InstrFormat::J;
    case InstrKind::Beq:
    case InstrKind::Bne:
    case InstrKind::Blt:
    case InstrKind::Bge:
    case InstrKind::Bltu:
    case InstrKind::Bgeu: return InstrFormat::B;
    case InstrKind::Sb:
    case InstrKind::Sh:
    case InstrKind::Sw:
    case InstrKind::Sdtcheck: return InstrFormat::S;
    case InstrKind::Add:
    case InstrKind::Sub:
    case InstrKind::Sll:
    case InstrKind::Slt:
    case InstrKind::Sltu:
    case InstrKind::Xor:
    case InstrKind::Srl:
    case InstrKind::Sra:
    case InstrKind::Or:
    case InstrKind::And: return InstrFormat::R;
    case InstrKind::Ecall:
    case InstrKind::Ebreak: return InstrFormat::Sys;
    default: return InstrFormat::I;
  }
}

inline bool is_load(InstrKind k) {
  return k == InstrKind::Lb || k == InstrKind::Lh || k == InstrKind::Lw ||
         k == InstrKind::Lbu || k == InstrKind::Lhu;
}

inline bool is_store(InstrKind k) {
  return k == InstrKind::Sb || k == InstrKind::Sh || k == InstrKind::Sw;
}

inline bool is_branch(InstrKind k) {
  return k >= InstrKind::Beq && k <= InstrKind::Bgeu;
}

struct TrapCause {
  enum class Cause {
    IllegalInstruction,
    MisalignedAccess,
    InstrFault,
    MemFault,
    TagMismatch,
    EnvBreak,
  };
  Cause cause = Cause::IllegalInstruction;
  uint32_t addr = 0;  // faulting address, 0 when not applicable

  bool operator==(const TrapCause&) const = default;
};

inline const char* trap_cause_name(TrapCause::Cause c) {
  switch (c) {
    case TrapCause::Cause::IllegalInstruction: return "illegal_instruction";
    case TrapCause::Cause::MisalignedAccess: return "misaligned_access";
    case TrapCause::Cause::InstrFault: return "instr_fault";
    case TrapCause::Cause::MemFault: return "mem_fault";
    case TrapCause::Cause::TagMismatch: return "tag_mismatch";
    case TrapCause::Cause::EnvBreak: return "env_break";
  }
  return "?";
}

inline constexpr size_t kDefaultMemSize = 1u << 20;  // 1 MiB
inline constexpr unsigned kRegSp = 2;
inline constexpr unsigned kRegRa = 1;
inline constexpr unsigned kRegA0 = 10;
inline constexpr unsigned kRegA1 = 11;
inline constexpr unsigned kRegA7 = 17;

// One simulated hart. Flat little-endian memory image loaded at 0,
// entry pc 0, sp initialized to the top of the image.
struct CpuState {
  enum class Status { Running, Halted, Trapped };

  uint32_t pc = 0;
  std::array<uint32_t, 32> regs{};
  std::vector<uint8_t> mem;
  std::map<uint32_t, uint32_t> csrs;
  Status status = Status::Running;
  uint32_t exit_code = 0;  // valid when Halted
  TrapCause trap{};        // valid when Trapped

  explicit CpuState(size_t mem_size = kDefaultMemSize) : mem(mem_size) {
    regs[kRegSp] = static_cast<uint32_t>(mem_size);
  }

  void load_image(const std::vector<uint8_t>& image) {
    for (size_t i = 0; i < image.size() && i < mem.size(); ++i) mem[i] = image[i];
  }

  bool running() const { return status == Status::Running; }

  bool in_mem(uint32_t addr, uint32_t len) const {
    return static_cast<uint64_t>(addr) + len <= mem.size();
  }

  uint32_t load32(uint32_t a) const {
    return static_cast<uint32_t>(mem[a]) | static_cast<uint32_t>(mem[a + 1]) << 8 |
           static_cast<uint32_t>(mem[a + 2]) << 16 | static_cast<uint32_t>(mem[a + 3]) << 24;
  }
  uint16_t load16(uint32_t a) const {
    return static_cast<uint16_t>(mem[a] | mem[a + 1] << 8);
  }
  void store32(uint32_t a, uint32_t v) {
    mem[a] = static_cast<uint8_t>(v);
    mem[a + 1] = static_cast<uint8_t>(v >> 8);
    mem[a + 2] = static_cast<uint8_t>(v >> 16);
    mem[a + 3] = static_cast<uint8_t>(v >> 24);
  }
  void store16(uint32_t a, uint16_t v) {
    mem[a] = static_cast<uint8_t>(v);
    mem[a + 1] = static_cast<uint8_t>(v >> 8);
  }

  uint32_t csr_read(uint32_t addr) const {
    auto it = csrs.find(addr);
    return it == csrs.end() ? 0 : it->second;
  }
  void csr_write(uint32_t addr, uint32_t v) { csrs[addr] = v; }

  // Status transitions are monotone: the first halt/trap wins.
  void halt(uint32_t code) {
    if (status != Status::Running) return;
    status = Status::Halted;
    exit_code = code;
  }
  void fault(TrapCause::Cause cause, uint32_t addr) {
    if (status != Status::Running) return;
    status = Status::Trapped;
    trap = {cause, addr};
  }
};

namespace detail {

inline int32_t sext(uint32_t v, int bits) {
  uint32_t m = 1u << (bits - 1);
  return static_cast<int32_t>((v ^ m) - m);
}

inline int32_t imm_i(uint32_t w) { return sext(w >> 20, 12); }
inline int32_t imm_s(uint32_t w) {
  return sext(((w >> 7) & 0x1F) | ((w >> 20) & 0xFE0), 12);
}
inline int32_t imm_b(uint32_t w) {
  uint32_t v = ((w >> 7) & 0x1E) | ((w >> 20) & 0x7E0) | ((w << 4) & 0x800) |
               ((w >> 19) & 0x1000);
  return sext(v, 13);
}
inline int32_t imm_u(uint32_t w) { return static_cast<int32_t>(w & 0xFFFFF000u); }
inline int32_t imm_j(uint32_t w) {
  uint32_t v = ((w >> 20) & 0x7FE) | ((w >> 9) & 0x800) | (w & 0xFF000) |
               ((w >> 11) & 0x100000);
  return sext(v, 21);
}

}  // namespace detail

// Decodes one 32-bit word. Unknown (opcode, funct3, funct7) combinations
// come back with kind == Illegal; fields are canonicalized per format so
// decode(encode(i)) == i holds for assembler-producible instructions.
inline Instruction decode(uint32_t w) {
  Instruction in;
  in.opcode = static_cast<uint8_t>(w & 0x7F);
  const uint8_t rd = static_cast<uint8_t>((w >> 7) & 0x1F);
  const uint8_t funct3 = static_cast<uint8_t>((w >> 12) & 0x7);
  const uint8_t rs1 = static_cast<uint8_t>((w >> 15) & 0x1F);
  const uint8_t rs2 = static_cast<uint8_t>((w >> 20) & 0x1F);
  const uint8_t funct7 = static_cast<uint8_t>(w >> 25);

  auto ifmt = [&](InstrKind k) {
    in.kind = k;
    in.rd = rd;
    in.rs1 = rs1;
    in.funct3 = funct3;
    in.imm = detail::imm_i(w);
  };
  auto sfmt = [&](InstrKind k) {
    in.kind = k;
    in.rs1 = rs1;
    in.rs2 = rs2;
    in.funct3 = funct3;
    in.imm = detail::imm_s(w);
  };

  switch (w & 0x7F) {
    case kOpLui:
      in.kind = InstrKind::Lui;
      in.rd = rd;
      in.imm = detail::imm_u(w);
      break;
    case kOpAuipc:
      in.kind = InstrKind::Auipc;
      in.rd = rd;
      in.imm = detail::imm_u(w);
      break;
    case kOpJal:
      in.kind = InstrKind::Jal;
      in.rd = rd;
      in.imm = detail::imm_j(w);
      break;
    case kOpJalr:
      if (funct3 == 0) ifmt(InstrKind::Jalr);
      break;
    case kOpBranch: {
      static constexpr InstrKind kBr[8] = {
          InstrKind::Beq, InstrKind::Bne, InstrKind::Illegal, InstrKind::Illegal,
          InstrKind::Blt, InstrKind::Bge, InstrKind::Bltu,    InstrKind::Bgeu};
      if (kBr[funct3] != InstrKind::Illegal) {
        in.kind = kBr[funct3];
        in.rs1 = rs1;
        in.rs2 = rs2;
        in.funct3 = funct3;
        in.imm = detail::imm_b(w);
      }
      break;
    }
    case kOpLoad: {
      static constexpr InstrKind kLd[8] = {
          InstrKind::Lb,  InstrKind::Lh,  InstrKind::Lw, InstrKind::Illegal,
          InstrKind::Lbu, InstrKind::Lhu, InstrKind::Illegal, InstrKind::Illegal};
      if (kLd[funct3] != InstrKind::Illegal) ifmt(kLd[funct3]);
      break;
    }
    case kOpStore: {
      static constexpr InstrKind kSt[8] = {
          InstrKind::Sb, InstrKind::Sh, InstrKind::Sw, InstrKind::Illegal,
          InstrKind::Illegal, InstrKind::Illegal, InstrKind::Illegal, InstrKind::Illegal};
      if (kSt[funct3] != InstrKind::Illegal) sfmt(kSt[funct3]);
      break;
    }
    case kOpOpImm:
      switch (funct3) {
        case 0: ifmt(InstrKind::Addi); break;
        case 2: ifmt(InstrKind::Slti); break;
        case 3: ifmt(InstrKind::Sltiu); break;
        case 4: ifmt(InstrKind::Xori); break;
        case 6: ifmt(InstrKind::Ori); break;
        case 7: ifmt(InstrKind::Andi); break;
        case 1:
          if (funct7 == 0x00) {
            ifmt(InstrKind::Slli);
            in.funct7 = funct7;
            in.imm = rs2;  // shamt
          }
          break;
        case 5:
          if (funct7 == 0x00 || funct7 == 0x20) {
            ifmt(funct7 == 0x00 ? InstrKind::Srli : InstrKind::Srai);
            in.funct7 = funct7;
            in.imm = rs2;  // shamt
          }
          break;
      }
      break;
    case kOpOp: {
      InstrKind k = InstrKind::Illegal;
      if (funct7 == 0x00) {
        static constexpr InstrKind kR0[8] = {
            InstrKind::Add, InstrKind::Sll, InstrKind::Slt, InstrKind::Sltu,
            InstrKind::Xor, InstrKind::Srl, InstrKind::Or,  InstrKind::And};
        k = kR0[funct3];
      } else if (funct7 == 0x20) {
        if (funct3 == 0) k = InstrKind::Sub;
        if (funct3 == 5) k = InstrKind::Sra;
      }
      if (k != InstrKind::Illegal) {
        in.kind = k;
        in.rd = rd;
        in.rs1 = rs1;
        in.rs2 = rs2;
        in.funct3 = funct3;
        in.funct7 = funct7;
      }
      break;
    }
    case kOpSystem:
      if (funct3 == 0 && rd == 0 && rs1 == 0) {
        if ((w >> 20) == 0) in.kind = InstrKind::Ecall;
        if ((w >> 20) == 1) in.kind = InstrKind::Ebreak;
      } else if (funct3 == 1 || funct3 == 2) {
        in.kind = funct3 == 1 ? InstrKind::Csrrw : InstrKind::Csrrs;
        in.rd = rd;
        in.rs1 = rs1;
        in.funct3 = funct3;
        in.imm = static_cast<int32_t>(w >> 20);  // csr number, zero-extended
      }
      break;
    case kOpLdtcheck:
      if (funct3 == 2) ifmt(InstrKind::Ldtcheck);
      break;
    case kOpSdtcheck:
      if (funct3 == 2) sfmt(InstrKind::Sdtcheck);
      break;
  }
  if (in.kind == InstrKind::Illegal) {
    in = Instruction{};
    in.opcode = static_cast<uint8_t>(w & 0x7F);
  }
  return in;
}

}  // namespace taintriv

#endif  // TAINTRIV_ISA_HPP
