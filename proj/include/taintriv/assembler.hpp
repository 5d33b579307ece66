#ifndef TAINTRIV_ASSEMBLER_HPP
#define TAINTRIV_ASSEMBLER_HPP

#include <cctype>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "taintriv/isa.hpp"

namespace taintriv {

struct EncodeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

struct Encoding {
  uint32_t opcode;
  uint8_t funct3;
  uint8_t funct7;
  const char* mnemonic;
};

inline Encoding encoding_of(InstrKind k) {
  switch (k) {
    case InstrKind::Lui: return {kOpLui, 0, 0, "lui"};
    case InstrKind::Auipc: return {kOpAuipc, 0, 0, "auipc"};
    case InstrKind::Jal: return {kOpJal, 0, 0, "jal"};
    case InstrKind::Jalr: return {kOpJalr, 0, 0, "jalr"};
    case InstrKind::Beq: return {kOpBranch, 0, 0, "beq"};
    case InstrKind::Bne: return {kOpBranch, 1, 0, "bne"};
    case InstrKind::Blt: return {kOpBranch, 4, 0, "blt"};
    case InstrKind::Bge: return {kOpBranch, 5, 0, "bge"};
    case InstrKind::Bltu: return {kOpBranch, 6, 0, "bltu"};
    case InstrKind::Bgeu: return {kOpBranch, 7, 0, "bgeu"};
    case InstrKind::Lb: return {kOpLoad, 0, 0, "lb"};
    case InstrKind::Lh: return {kOpLoad, 1, 0, "lh"};
    case InstrKind::Lw: return {kOpLoad, 2, 0, "lw"};
    case InstrKind::Lbu: return {kOpLoad, 4, 0, "lbu"};
    case InstrKind::Lhu: return {kOpLoad, 5, 0, "lhu"};
    case InstrKind::Sb: return {kOpStore, 0, 0, "sb"};
    case InstrKind::Sh: return {kOpStore, 1, 0, "sh"};
    case InstrKind::Sw: return {kOpStore, 2, 0, "sw"};
    case InstrKind::Addi: return {kOpOpImm, 0, 0, "addi"};
    case InstrKind::Slti: return {kOpOpImm, 2, 0, "slti"};
    case InstrKind::Sltiu: return {kOpOpImm, 3, 0, "sltiu"};
    case InstrKind::Xori: return {kOpOpImm, 4, 0, "xori"};
    case InstrKind::Ori: return {kOpOpImm, 6, 0, "ori"};
    case InstrKind::Andi: return {kOpOpImm, 7, 0, "andi"};
    case InstrKind::Slli: return {kOpOpImm, 1, 0x00, "slli"};
    case InstrKind::Srli: return {kOpOpImm, 5, 0x00, "srli"};
    case InstrKind::Srai: return {kOpOpImm, 5, 0x20, "srai"};
    case InstrKind::Add: return {kOpOp, 0, 0x00, "add"};
    case InstrKind::Sub: return {kOpOp, 0, 0x20, "sub"};
    case InstrKind::Sll: return {kOpOp, 1, 0x00, "sll"};
    case InstrKind::Slt: return {kOpOp, 2, 0x00, "slt"};
    case InstrKind::Sltu: return {kOpOp, 3, 0x00, "sltu"};
    case InstrKind::Xor: return {kOpOp, 4, 0x00, "xor"};
    case InstrKind::Srl: return {kOpOp, 5, 0x00, "srl"};
    case InstrKind::Sra: return {kOpOp, 5, 0x20, "sra"};
    case InstrKind::Or: return {kOpOp, 6, 0x00, "or"};
    case InstrKind::And: return {kOpOp, 7, 0x00, "and"};
    case InstrKind::Ecall: return {kOpSystem, 0, 0, "ecall"};
    case InstrKind::Ebreak: return {kOpSystem, 0, 0, "ebreak"};
    case InstrKind::Csrrw: return {kOpSystem, 1, 0, "csrrw"};
    case InstrKind::Csrrs: return {kOpSystem, 2, 0, "csrrs"};
    case InstrKind::Ldtcheck: return {kOpLdtcheck, 2, 0, "ldtcheck"};
    case InstrKind::Sdtcheck: return {kOpSdtcheck, 2, 0, "sdtcheck"};
    case InstrKind::Illegal: break;
  }
  return {0, 0, 0, ".word"};
}

inline void check_range(bool ok, const char* what) {
  if (!ok) throw EncodeError(std::string(what));
}

}  // namespace detail

// Builds a canonical Instruction for the given kind; field values match
// what decode produces, so decode(encode(make_instruction(...))) is an
// identity on every representable instruction.
inline Instruction make_instruction(InstrKind k, uint8_t rd, uint8_t rs1, uint8_t rs2,
                                    int32_t imm) {
  const auto enc = detail::encoding_of(k);
  Instruction in;
  in.kind = k;
  in.opcode = static_cast<uint8_t>(enc.opcode);
  in.funct3 = enc.funct3;
  switch (format_of(k)) {
    case InstrFormat::R:
      in.rd = rd;
      in.rs1 = rs1;
      in.rs2 = rs2;
      in.funct7 = enc.funct7;
      break;
    case InstrFormat::I:
      in.rd = rd;
      in.rs1 = rs1;
      in.imm = imm;
      if (k == InstrKind::Slli || k == InstrKind::Srli || k == InstrKind::Srai)
        in.funct7 = enc.funct7;
      break;
    case InstrFormat::S:
    case InstrFormat::B:
      in.rs1 = rs1;
      in.rs2 = rs2;
      in.imm = imm;
      break;
    case InstrFormat::U:
    case InstrFormat::J:
      in.rd = rd;
      in.imm = imm;
      break;
    case InstrFormat::Sys:
      break;
  }
  return in;
}

// Inverse of decode. Throws EncodeError when a field is out of its
// format's range.
inline uint32_t encode(const Instruction& in) {
  using detail::check_range;
  const auto enc = detail::encoding_of(in.kind);
  check_range(in.kind != InstrKind::Illegal, "cannot encode an illegal instruction");
  check_range(in.rd < 32 && in.rs1 < 32 && in.rs2 < 32, "register index out of range");
  const uint32_t op = enc.opcode;
  const uint32_t f3 = static_cast<uint32_t>(enc.funct3) << 12;
  const int64_t imm = in.imm;

  switch (format_of(in.kind)) {
    case InstrFormat::R:
      return static_cast<uint32_t>(enc.funct7) << 25 | static_cast<uint32_t>(in.rs2) << 20 |
             static_cast<uint32_t>(in.rs1) << 15 | f3 | static_cast<uint32_t>(in.rd) << 7 | op;
    case InstrFormat::I: {
      if (in.kind == InstrKind::Slli || in.kind == InstrKind::Srli ||
          in.kind == InstrKind::Srai) {
        check_range(imm >= 0 && imm < 32, "shift amount out of range");
        return static_cast<uint32_t>(enc.funct7) << 25 | static_cast<uint32_t>(imm) << 20 |
               static_cast<uint32_t>(in.rs1) << 15 | f3 | static_cast<uint32_t>(in.rd) << 7 | op;
      }
      if (in.kind == InstrKind::Csrrw || in.kind == InstrKind::Csrrs) {
        check_range(imm >= 0 && imm <= 0xFFF, "csr address out of range");
        return static_cast<uint32_t>(imm) << 20 | static_cast<uint32_t>(in.rs1) << 15 | f3 |
               static_cast<uint32_t>(in.rd) << 7 | op;
      }
      check_range(imm >= -2048 && imm <= 2047, "I-type immediate out of range");
      return (static_cast<uint32_t>(imm) & 0xFFF) << 20 | static_cast<uint32_t>(in.rs1) << 15 |
             f3 | static_cast<uint32_t>(in.rd) << 7 | op;
    }
    case InstrFormat::S: {
      check_range(imm >= -2048 && imm <= 2047, "S-type immediate out of range");
      const uint32_t u = static_cast<uint32_t>(imm) & 0xFFF;
      return (u >> 5) << 25 | static_cast<uint32_t>(in.rs2) << 20 |
             static_cast<uint32_t>(in.rs1) << 15 | f3 | (u & 0x1F) << 7 | op;
    }
    case InstrFormat::B: {
      check_range(imm >= -4096 && imm <= 4094, "B-type immediate out of range");
      check_range(imm % 2 == 0, "branch offset must be even");
      const uint32_t u = static_cast<uint32_t>(imm) & 0x1FFF;
      return ((u >> 12) & 1) << 31 | ((u >> 5) & 0x3F) << 25 |
             static_cast<uint32_t>(in.rs2) << 20 | static_cast<uint32_t>(in.rs1) << 15 | f3 |
             ((u >> 1) & 0xF) << 8 | ((u >> 11) & 1) << 7 | op;
    }
    case InstrFormat::U:
      check_range((static_cast<uint32_t>(in.imm) & 0xFFF) == 0,
                  "U-type immediate has nonzero low bits");
      return (static_cast<uint32_t>(in.imm) & 0xFFFFF000u) | static_cast<uint32_t>(in.rd) << 7 |
             op;
    case InstrFormat::J: {
      check_range(imm >= -1048576 && imm <= 1048574, "J-type immediate out of range");
      check_range(imm % 2 == 0, "jump offset must be even");
      const uint32_t u = static_cast<uint32_t>(imm) & 0x1FFFFF;
      return ((u >> 20) & 1) << 31 | ((u >> 1) & 0x3FF) << 21 | ((u >> 11) & 1) << 20 |
             ((u >> 12) & 0xFF) << 12 | static_cast<uint32_t>(in.rd) << 7 | op;
    }
    case InstrFormat::Sys:
      return (in.kind == InstrKind::Ebreak ? 1u << 20 : 0u) | op;
  }
  throw EncodeError("unreachable");
}

// Textual form for traces and listings; unknown words render as .word.
inline std::string disassemble(uint32_t word) {
  const Instruction in = decode(word);
  std::ostringstream os;
  if (in.kind == InstrKind::Illegal) {
    os << ".word 0x" << std::hex << std::setw(8) << std::setfill('0') << word;
    return os.str();
  }
  const auto enc = detail::encoding_of(in.kind);
  os << enc.mnemonic;
  auto reg = [](unsigned r) { return "x" + std::to_string(r); };
  switch (in.kind) {
    case InstrKind::Lui:
    case InstrKind::Auipc:
      os << " " << reg(in.rd) << ", 0x" << std::hex
         << (static_cast<uint32_t>(in.imm) >> 12);
      break;
    case InstrKind::Jal:
      os << " " << reg(in.rd) << ", " << std::dec << in.imm;
      break;
    case InstrKind::Jalr:
      os << " " << reg(in.rd) << ", " << reg(in.rs1) << ", " << std::dec << in.imm;
      break;
    case InstrKind::Ecall:
    case InstrKind::Ebreak:
      break;
    case InstrKind::Csrrw:
    case InstrKind::Csrrs:
      os << " " << reg(in.rd) << ", 0x" << std::hex << in.imm << std::dec << ", "
         << reg(in.rs1);
      break;
    default:
      switch (format_of(in.kind)) {
        case InstrFormat::R:
          os << " " << reg(in.rd) << ", " << reg(in.rs1) << ", " << reg(in.rs2);
          break;
        case InstrFormat::I:
          if (is_load(in.kind) || in.kind == InstrKind::Ldtcheck)
            os << " " << reg(in.rd) << ", " << std::dec << in.imm << "(" << reg(in.rs1) << ")";
          else
            os << " " << reg(in.rd) << ", " << reg(in.rs1) << ", " << std::dec << in.imm;
          break;
        case InstrFormat::S:
          os << " " << reg(in.rs2) << ", " << std::dec << in.imm << "(" << reg(in.rs1) << ")";
          break;
        case InstrFormat::B:
          os << " " << reg(in.rs1) << ", " << reg(in.rs2) << ", " << std::dec << in.imm;
          break;
        default:
          break;
      }
  }
  return os.str();
}

struct AsmError {
  enum class Kind {
    UndefinedLabel,
    ImmediateOutOfRange,
    UnknownMnemonic,
    UnknownRegister,
    DuplicateLabel,
    Syntax,
  };
  Kind kind = Kind::Syntax;
  int line = 0;
  std::string message;
};

struct ListingEntry {
  uint32_t addr = 0;
  uint32_t word = 0;
  int line = 0;
  std::string source;
};

struct Program {
  std::vector<uint8_t> image;
  std::map<std::string, uint32_t> symbols;
  std::vector<ListingEntry> listing;
};

struct AssembleResult {
  Program program;
  std::vector<AsmError> errors;

  bool ok() const { return errors.empty(); }
};

namespace detail {

inline std::optional<unsigned> parse_register(const std::string& tok) {
  static const std::map<std::string, unsigned> kAbi = {
      {"zero", 0}, {"ra", 1},  {"sp", 2},  {"gp", 3},  {"tp", 4},  {"t0", 5},
      {"t1", 6},   {"t2", 7},  {"s0", 8},  {"fp", 8},  {"s1", 9},  {"a0", 10},
      {"a1", 11},  {"a2", 12}, {"a3", 13}, {"a4", 14}, {"a5", 15}, {"a6", 16},
      {"a7", 17},  {"s2", 18}, {"s3", 19}, {"s4", 20}, {"s5", 21}, {"s6", 22},
      {"s7", 23},  {"s8", 24}, {"s9", 25}, {"s10", 26}, {"s11", 27}, {"t3", 28},
      {"t4", 29},  {"t5", 30}, {"t6", 31}};
  if (tok.size() >= 2 && tok[0] == 'x') {
    unsigned n = 0;
    for (size_t i = 1; i < tok.size(); ++i) {
      if (!std::isdigit(static_cast<unsigned char>(tok[i]))) return std::nullopt;
      n = n * 10 + static_cast<unsigned>(tok[i] - '0');
    }
    return n < 32 ? std::optional<unsigned>(n) : std::nullopt;
  }
  auto it = kAbi.find(tok);
  if (it != kAbi.end()) return it->second;
  return std::nullopt;
}

inline std::optional<int64_t> parse_number(const std::string& tok) {
  if (tok.empty()) return std::nullopt;
  size_t i = 0;
  bool neg = false;
  if (tok[i] == '+' || tok[i] == '-') {
    neg = tok[i] == '-';
    ++i;
  }
  if (i >= tok.size()) return std::nullopt;
  int base = 10;
  if (tok.size() - i > 2 && tok[i] == '0' && (tok[i + 1] == 'x' || tok[i + 1] == 'X')) {
    base = 16;
    i += 2;
  }
  int64_t v = 0;
  for (; i < tok.size(); ++i) {
    const char c = static_cast<char>(std::tolower(static_cast<unsigned char>(tok[i])));
    int d;
    if (c >= '0' && c <= '9') d = c - '0';
    else if (base == 16 && c >= 'a' && c <= 'f') d = c - 'a' + 10;
    else return std::nullopt;
    v = v * base + d;
    if (v > 0x1'0000'0000LL) return std::nullopt;
  }
  return neg ? -v : v;
}

inline std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Splits an operand list on commas that are not inside quotes.
inline std::vector<std::string> split_operands(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (size_t i = 0; i < s.size(); ++i) {
    const char c = s[i];
    if (c == '"' && (i == 0 || s[i - 1] != '\\')) quoted = !quoted;
    if (c == ',' && !quoted) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!trim(cur).empty() || !out.empty()) out.push_back(trim(cur));
  return out;
}

inline std::optional<InstrKind> mnemonic_kind(const std::string& m) {
  static const std::map<std::string, InstrKind> kMap = [] {
    std::map<std::string, InstrKind> t;
    for (int k = 0; k <= static_cast<int>(InstrKind::Sdtcheck); ++k)
      t[encoding_of(static_cast<InstrKind>(k)).mnemonic] = static_cast<InstrKind>(k);
    return t;
  }();
  auto it = kMap.find(m);
  if (it == kMap.end()) return std::nullopt;
  return it->second;
}

inline std::optional<uint32_t> parse_csr(const std::string& tok) {
  if (tok == "tagstatus") return kCsrTagStatus;
  if (tok == "tagaddr") return kCsrTagAddr;
  auto n = parse_number(tok);
  if (n && *n >= 0 && *n <= 0xFFF) return static_cast<uint32_t>(*n);
  return std::nullopt;
}

// "imm(reg)" memory operand.
inline bool parse_mem_operand(const std::string& tok, std::string& imm, std::string& reg) {
  const size_t open = tok.find('(');
  const size_t close = tok.rfind(')');
  if (open == std::string::npos || close == std::string::npos || close < open ||
      close != tok.size() - 1)
    return false;
  imm = trim(tok.substr(0, open));
  reg = trim(tok.substr(open + 1, close - open - 1));
  if (imm.empty()) imm = "0";
  return !reg.empty();
}

inline std::optional<std::string> unescape_ascii(const std::string& body) {
  std::string out;
  for (size_t i = 0; i < body.size(); ++i) {
    if (body[i] != '\\') {
      out += body[i];
      continue;
    }
    if (++i >= body.size()) return std::nullopt;
    switch (body[i]) {
      case 'n': out += '\n'; break;
      case 't': out += '\t'; break;
      case 'r': out += '\r'; break;
      case '0': out += '\0'; break;
      case '\\': out += '\\'; break;
      case '"': out += '"'; break;
      default: return std::nullopt;
    }
  }
  return out;
}

struct Statement {
  enum class Type { Instr, Word, Ascii, Space };
  Type type = Type::Instr;
  int line = 0;
  std::string source;
  std::string mnemonic;
  std::vector<std::string> operands;
  std::string ascii;     // decoded .ascii payload
  uint32_t space = 0;    // .space size
  uint32_t addr = 0;
  uint32_t size = 0;
};

}  // namespace detail

// Two-pass assembler for the supported subset plus the secure
// mnemonics. Pseudo-instructions: nop, li (I-type range), j, ret.
inline AssembleResult assemble(const std::string& source) {
  using namespace detail;
  AssembleResult res;
  auto fail = [&res](AsmError::Kind kind, int line, const std::string& msg) {
    res.errors.push_back({kind, line, msg});
  };

  // Pass 1: split lines into labels and statements, lay out addresses.
  std::vector<Statement> stmts;
  std::vector<std::string> pending_labels;
  uint32_t lc = 0;
  auto bind_labels = [&](uint32_t addr, int line) {
    for (const auto& l : pending_labels) {
      if (res.program.symbols.count(l))
        fail(AsmError::Kind::DuplicateLabel, line, "duplicate label '" + l + "'");
      else
        res.program.symbols[l] = addr;
    }
    pending_labels.clear();
  };

  std::istringstream lines(source);
  std::string raw;
  int lineno = 0;
  while (std::getline(lines, raw)) {
    ++lineno;
    std::string text = raw.substr(0, raw.find('#'));
    // labels may prefix a statement on the same line
    for (;;) {
      const std::string t = trim(text);
      const size_t colon = t.find(':');
      if (colon == std::string::npos) break;
      const std::string label = trim(t.substr(0, colon));
      bool ident = !label.empty() &&
                   (std::isalpha(static_cast<unsigned char>(label[0])) || label[0] == '_' ||
                    label[0] == '.');
      for (char c : label)
        ident = ident && (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.');
      if (!ident) break;  // ':' inside an operand, not a label
      pending_labels.push_back(label);
      text = t.substr(colon + 1);
    }
    const std::string body = trim(text);
    if (body.empty()) continue;

    Statement st;
    st.line = lineno;
    st.source = body;
    const size_t sp = body.find_first_of(" \t");
    st.mnemonic = sp == std::string::npos ? body : body.substr(0, sp);
    const std::string rest = sp == std::string::npos ? "" : trim(body.substr(sp));
    st.operands = split_operands(rest);

    if (st.mnemonic == ".word") {
      st.type = Statement::Type::Word;
      lc = (lc + 3) & ~3u;
      st.addr = lc;
      st.size = 4;
    } else if (st.mnemonic == ".ascii") {
      st.type = Statement::Type::Ascii;
      const std::string v = trim(rest);
      if (v.size() < 2 || v.front() != '"' || v.back() != '"') {
        fail(AsmError::Kind::Syntax, lineno, ".ascii expects a quoted string");
        continue;
      }
      auto dec = unescape_ascii(v.substr(1, v.size() - 2));
      if (!dec) {
        fail(AsmError::Kind::Syntax, lineno, "bad escape in .ascii string");
        continue;
      }
      st.ascii = *dec;
      st.addr = lc;
      st.size = static_cast<uint32_t>(st.ascii.size());
    } else if (st.mnemonic == ".space") {
      st.type = Statement::Type::Space;
      auto n = st.operands.size() == 1 ? parse_number(st.operands[0]) : std::nullopt;
      if (!n || *n < 0) {
        fail(AsmError::Kind::Syntax, lineno, ".space expects a non-negative size");
        continue;
      }
      st.space = static_cast<uint32_t>(*n);
      st.addr = lc;
      st.size = st.space;
    } else {
      st.type = Statement::Type::Instr;
      lc = (lc + 3) & ~3u;  // instructions are word-aligned
      st.addr = lc;
      st.size = 4;
    }
    bind_labels(st.addr, lineno);
    lc = st.addr + st.size;
    stmts.push_back(std::move(st));
  }
  bind_labels(lc, lineno);

  // Pass 2: encode against the symbol table.
  res.program.image.assign(lc, 0);
  auto put32 = [&](uint32_t addr, uint32_t w) {
    res.program.image[addr] = static_cast<uint8_t>(w);
    res.program.image[addr + 1] = static_cast<uint8_t>(w >> 8);
    res.program.image[addr + 2] = static_cast<uint8_t>(w >> 16);
    res.program.image[addr + 3] = static_cast<uint8_t>(w >> 24);
  };

  for (const auto& st : stmts) {
    const int line = st.line;
    auto reg_or_fail = [&](const std::string& tok) -> std::optional<unsigned> {
      auto r = parse_register(tok);
      if (!r) fail(AsmError::Kind::UnknownRegister, line, "unknown register '" + tok + "'");
      return r;
    };
    // numeric or label value
    auto value_of = [&](const std::string& tok) -> std::optional<int64_t> {
      if (auto n = parse_number(tok)) return n;
      auto it = res.program.symbols.find(tok);
      if (it != res.program.symbols.end()) return it->second;
      fail(AsmError::Kind::UndefinedLabel, line, "undefined label '" + tok + "'");
      return std::nullopt;
    };
    // numeric operands are pc-relative offsets, labels resolve to offsets
    auto target_of = [&](const std::string& tok) -> std::optional<int64_t> {
      if (auto n = parse_number(tok)) return n;
      auto it = res.program.symbols.find(tok);
      if (it != res.program.symbols.end())
        return static_cast<int64_t>(it->second) - static_cast<int64_t>(st.addr);
      fail(AsmError::Kind::UndefinedLabel, line, "undefined label '" + tok + "'");
      return std::nullopt;
    };
    auto expect_ops = [&](size_t n) {
      if (st.operands.size() == n) return true;
      fail(AsmError::Kind::Syntax, line,
           st.mnemonic + " expects " + std::to_string(n) + " operand(s)");
      return false;
    };
    auto emit = [&](const Instruction& in) {
      try {
        const uint32_t w = encode(in);
        put32(st.addr, w);
        res.program.listing.push_back({st.addr, w, line, st.source});
      } catch (const EncodeError& e) {
        fail(AsmError::Kind::ImmediateOutOfRange, line, e.what());
      }
    };

    switch (st.type) {
      case Statement::Type::Word: {
        if (!expect_ops(1)) break;
        if (auto v = value_of(st.operands[0]))
          put32(st.addr, static_cast<uint32_t>(*v));
        break;
      }
      case Statement::Type::Ascii:
        for (size_t i = 0; i < st.ascii.size(); ++i)
          res.program.image[st.addr + i] = static_cast<uint8_t>(st.ascii[i]);
        break;
      case Statement::Type::Space:
        break;
      case Statement::Type::Instr: {
        std::string mn = st.mnemonic;
        std::vector<std::string> ops = st.operands;
        // pseudo-instructions
        if (mn == "nop") {
          if (!expect_ops(0)) break;
          mn = "addi";
          ops = {"x0", "x0", "0"};
        } else if (mn == "li") {
          if (!expect_ops(2)) break;
          mn = "addi";
          ops = {ops[0], "x0", ops[1]};
        } else if (mn == "j") {
          if (!expect_ops(1)) break;
          mn = "jal";
          ops = {"x0", ops[0]};
        } else if (mn == "ret") {
          if (!expect_ops(0)) break;
          mn = "jalr";
          ops = {"x0", "x1", "0"};
        }

        auto kind = mnemonic_kind(mn);
        if (!kind) {
          fail(AsmError::Kind::UnknownMnemonic, line, "unknown mnemonic '" + mn + "'");
          break;
        }
        const InstrKind k = *kind;

        if (k == InstrKind::Ecall || k == InstrKind::Ebreak) {
          if (!expect_ops(0)) break;
          emit(make_instruction(k, 0, 0, 0, 0));
          break;
        }
        if (k == InstrKind::Csrrw || k == InstrKind::Csrrs) {
          if (!expect_ops(3)) break;
          auto rd = reg_or_fail(ops[0]);
          auto csr = parse_csr(ops[1]);
          auto rs1 = reg_or_fail(ops[2]);
          if (!csr) fail(AsmError::Kind::Syntax, line, "bad csr operand '" + ops[1] + "'");
          if (!rd || !csr || !rs1) break;
          emit(make_instruction(k, static_cast<uint8_t>(*rd), static_cast<uint8_t>(*rs1), 0,
                                static_cast<int32_t>(*csr)));
          break;
        }
        if (is_load(k) || k == InstrKind::Ldtcheck) {
          if (!expect_ops(2)) break;
          auto rd = reg_or_fail(ops[0]);
          std::string immTok, regTok;
          if (!parse_mem_operand(ops[1], immTok, regTok)) {
            fail(AsmError::Kind::Syntax, line, "expected imm(reg) operand");
            break;
          }
          auto rs1 = reg_or_fail(regTok);
          auto imm = parse_number(immTok);
          if (!imm) fail(AsmError::Kind::Syntax, line, "bad immediate '" + immTok + "'");
          if (!rd || !rs1 || !imm) break;
          emit(make_instruction(k, static_cast<uint8_t>(*rd), static_cast<uint8_t>(*rs1), 0,
                                static_cast<int32_t>(*imm)));
          break;
        }
        if (is_store(k) || k == InstrKind::Sdtcheck) {
          if (!expect_ops(2)) break;
          auto rs2 = reg_or_fail(ops[0]);
          std::string immTok, regTok;
          if (!parse_mem_operand(ops[1], immTok, regTok)) {
            fail(AsmError::Kind::Syntax, line, "expected imm(reg) operand");
            break;
          }
          auto rs1 = reg_or_fail(regTok);
          auto imm = parse_number(immTok);
          if (!imm) fail(AsmError::Kind::Syntax, line, "bad immediate '" + immTok + "'");
          if (!rs2 || !rs1 || !imm) break;
          emit(make_instruction(k, 0, static_cast<uint8_t>(*rs1), static_cast<uint8_t>(*rs2),
                                static_cast<int32_t>(*imm)));
          break;
        }
        if (is_branch(k)) {
          if (!expect_ops(3)) break;
          auto rs1 = reg_or_fail(ops[0]);
          auto rs2 = reg_or_fail(ops[1]);
          auto off = target_of(ops[2]);
          if (!rs1 || !rs2 || !off) break;
          emit(make_instruction(k, 0, static_cast<uint8_t>(*rs1), static_cast<uint8_t>(*rs2),
                                static_cast<int32_t>(*off)));
          break;
        }
        if (k == InstrKind::Jal) {
          if (!expect_ops(2)) break;
          auto rd = reg_or_fail(ops[0]);
          auto off = target_of(ops[1]);
          if (!rd || !off) break;
          emit(make_instruction(k, static_cast<uint8_t>(*rd), 0, 0,
                                static_cast<int32_t>(*off)));
          break;
        }
        if (k == InstrKind::Lui || k == InstrKind::Auipc) {
          if (!expect_ops(2)) break;
          auto rd = reg_or_fail(ops[0]);
          auto v = parse_number(ops[1]);
          if (!v || *v < 0 || *v > 0xFFFFF) {
            fail(AsmError::Kind::ImmediateOutOfRange, line,
                 "U-type immediate out of range (20 bits)");
            break;
          }
          if (!rd) break;
          emit(make_instruction(k, static_cast<uint8_t>(*rd), 0, 0,
                                static_cast<int32_t>(*v << 12)));
          break;
        }
        if (k == InstrKind::Jalr) {
          if (!expect_ops(3)) break;
          auto rd = reg_or_fail(ops[0]);
          auto rs1 = reg_or_fail(ops[1]);
          auto imm = parse_number(ops[2]);
          if (!imm) fail(AsmError::Kind::Syntax, line, "bad immediate '" + ops[2] + "'");
          if (!rd || !rs1 || !imm) break;
          emit(make_instruction(k, static_cast<uint8_t>(*rd), static_cast<uint8_t>(*rs1), 0,
                                static_cast<int32_t>(*imm)));
          break;
        }
        if (format_of(k) == InstrFormat::R) {
          if (!expect_ops(3)) break;
          auto rd = reg_or_fail(ops[0]);
          auto rs1 = reg_or_fail(ops[1]);
          auto rs2 = reg_or_fail(ops[2]);
          if (!rd || !rs1 || !rs2) break;
          emit(make_instruction(k, static_cast<uint8_t>(*rd), static_cast<uint8_t>(*rs1),
                                static_cast<uint8_t>(*rs2), 0));
          break;
        }
        // remaining I-type ALU
        if (!expect_ops(3)) break;
        auto rd = reg_or_fail(ops[0]);
        auto rs1 = reg_or_fail(ops[1]);
        auto imm = parse_number(ops[2]);
        if (!imm) fail(AsmError::Kind::Syntax, line, "bad immediate '" + ops[2] + "'");
        if (!rd || !rs1 || !imm) break;
        emit(make_instruction(k, static_cast<uint8_t>(*rd), static_cast<uint8_t>(*rs1), 0,
                              static_cast<int32_t>(*imm)));
        break;
      }
    }
  }
  return res;
}

}  // namespace taintriv

#endif  // TAINTRIV_ASSEMBLER_HPP
