// Copyright 2026 The q8s Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "q8s/qasm.hpp"

#include <cctype>
#include <charconv>

namespace q8s {

std::string_view to_string(OpKind kind) {
  switch (kind) {
    case OpKind::H: return "h";
    case OpKind::X: return "x";
    case OpKind::Z: return "z";
    case OpKind::CX: return "cx";
    case OpKind::Measure: return "measure";
  }
  return "h";
}

size_t Circuit::gate_count() const {
  size_t n = 0;
  for (const auto& op : ops) n += op.kind != OpKind::Measure;
  return n;
}

void Circuit::validate() const {
  if (num_qubits < 1 || num_qubits > kMaxQubits) {
    throw Error("InvariantViolation", "circuit must have between 1 and " + std::to_string(kMaxQubits) + " qubits");
  }
  if (num_clbits < 0) throw Error("InvariantViolation", "negative clbit count");
  for (const auto& op : ops) {
    size_t arity = op.kind == OpKind::CX ? 2 : 1;
    if (op.qubits.size() != arity) throw Error("InvariantViolation", std::string(to_string(op.kind)) + ": wrong arity");
    for (int q : op.qubits) {
      if (q < 0 || q >= num_qubits) throw Error("IndexOutOfRange", "qubit index " + std::to_string(q) + " out of range");
    }
    if (op.kind == OpKind::CX && op.qubits[0] == op.qubits[1]) {
      throw Error("InvariantViolation", "CX qubits must be distinct");
    }
    if (op.kind == OpKind::Measure) {
      if (!op.clbit) throw Error("InvariantViolation", "measure without a clbit");
      if (*op.clbit < 0 || *op.clbit >= num_clbits) {
        throw Error("IndexOutOfRange", "clbit index " + std::to_string(*op.clbit) + " out of range");
      }
    } else if (op.clbit) {
      throw Error("InvariantViolation", std::string(to_string(op.kind)) + " cannot target a clbit");
    }
  }
}

namespace {

enum class Tok { Ident, Number, Real, String, Punct, Arrow, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  Position pos;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  Token next() {
    skip_space();
    Token t;
    t.pos = {line_, col_};
    if (i_ >= src_.size()) return t;
    char c = src_[i_];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t start = i_;
      while (i_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[i_])) || src_[i_] == '_')) advance();
      t.kind = Tok::Ident;
      t.text = std::string(src_.substr(start, i_ - start));
      return t;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      size_t start = i_;
      while (i_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[i_]))) advance();
      t.kind = Tok::Number;
      if (i_ < src_.size() && src_[i_] == '.') {
        advance();
        while (i_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[i_]))) advance();
        t.kind = Tok::Real;
      }
      t.text = std::string(src_.substr(start, i_ - start));
      return t;
    }
    if (c == '"') {
      advance();
      size_t start = i_;
      while (i_ < src_.size() && src_[i_] != '"' && src_[i_] != '\n') advance();
      if (i_ >= src_.size() || src_[i_] != '"') throw PositionedError("SyntaxError", t.pos, "unterminated string");
      t.kind = Tok::String;
      t.text = std::string(src_.substr(start, i_ - start));
      advance();
      return t;
    }
    if (c == '-' && i_ + 1 < src_.size() && src_[i_ + 1] == '>') {
      advance();
      advance();
      t.kind = Tok::Arrow;
      t.text = "->";
      return t;
    }
    if (std::string_view("[];,(){}=").find(c) != std::string_view::npos) {
      advance();
      t.kind = Tok::Punct;
      t.text = std::string(1, c);
      return t;
    }
    throw PositionedError("SyntaxError", t.pos, std::string("unexpected character '") + c + "'");
  }

 private:
  void advance() {
    if (src_[i_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++i_;
  }

  void skip_space() {
    while (i_ < src_.size()) {
      char c = src_[i_];
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        advance();
      } else if (c == '/' && i_ + 1 < src_.size() && src_[i_ + 1] == '/') {
        while (i_ < src_.size() && src_[i_] != '\n') advance();
      } else {
        break;
      }
    }
  }

  std::string_view src_;
  size_t i_ = 0;
  int line_ = 1;
  int col_ = 1;
};

class Parser {
 public:
  explicit Parser(std::string_view src) : lex_(src) { tok_ = lex_.next(); }

  Circuit parse() {
    header();
    while (tok_.kind != Tok::End) statement();
    if (qreg_.empty()) throw PositionedError("SyntaxError", tok_.pos, "missing qreg declaration");
    return circuit_;
  }

 private:
  [[noreturn]] void syntax(const std::string& message) const {
    throw PositionedError("SyntaxError", tok_.pos, message);
  }

  [[noreturn]] void unsupported(const Token& t) const {
    throw PositionedError("UnsupportedStatement", t.pos, "unsupported statement '" + t.text + "'");
  }

  Token take() {
    Token t = tok_;
    tok_ = lex_.next();
    return t;
  }

  void expect(std::string_view punct) {
    if (tok_.kind != Tok::Punct || tok_.text != punct) {
      syntax("expected '" + std::string(punct) + "'" + describe());
    }
    take();
  }

  std::string describe() const {
    if (tok_.kind == Tok::End) return " but reached end of input";
    return " but found '" + tok_.text + "'";
  }

  int number() {
    if (tok_.kind != Tok::Number) syntax("expected an integer" + describe());
    Token t = take();
    int v = 0;
    auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
    if (ec != std::errc() || ptr != t.text.data() + t.text.size()) {
      throw PositionedError("IndexOutOfRange", t.pos, "integer '" + t.text + "' is too large");
    }
    return v;
  }

  void header() {
    if (tok_.kind != Tok::Ident || tok_.text != "OPENQASM") syntax("program must begin with 'OPENQASM 2.0;'");
    take();
    if (tok_.kind != Tok::Real && tok_.kind != Tok::Number) syntax("expected a version number" + describe());
    Token version = take();
    if (version.text != "2.0") {
      throw PositionedError("UnsupportedStatement", version.pos, "unsupported OpenQASM version '" + version.text + "'");
    }
    expect(";");
  }

  void statement() {
    if (tok_.kind != Tok::Ident) syntax("expected a statement" + describe());
    const std::string& word = tok_.text;
    if (word == "include") return include();
    if (word == "qreg" || word == "creg") return reg();
    if (word == "h" || word == "x" || word == "z") return single_qubit_gate();
    if (word == "cx") return cx();
    if (word == "measure") return measure();
    unsupported(tok_);
  }

  void include() {
    take();
    if (seen_body_) syntax("include must precede register declarations and gates");
    if (tok_.kind != Tok::String) syntax("expected a file name string" + describe());
    Token file = take();
    if (file.text != "qelib1.inc") {
      throw PositionedError("UnsupportedStatement", file.pos, "only \"qelib1.inc\" can be included");
    }
    expect(";");
  }

  void reg() {
    Token kw = take();
    seen_body_ = true;
    bool quantum = kw.text == "qreg";
    if (!circuit_.ops.empty()) syntax("register declarations must precede gates");
    if ((quantum && !qreg_.empty()) || (!quantum && !creg_.empty())) {
      throw PositionedError("UnsupportedStatement", kw.pos, "only one " + kw.text + " is supported");
    }
    if (tok_.kind != Tok::Ident) syntax("expected a register name" + describe());
    Token name = take();
    if (name.text == qreg_ || name.text == creg_) syntax("register '" + name.text + "' is already declared");
    expect("[");
    Token size_tok = tok_;
    int size = number();
    expect("]");
    expect(";");
    if (quantum) {
      if (size < 1 || size > kMaxQubits) {
        throw PositionedError("InvariantViolation", size_tok.pos,
                              "qreg size must be between 1 and " + std::to_string(kMaxQubits));
      }
      qreg_ = name.text;
      circuit_.num_qubits = size;
    } else {
      if (size < 1) throw PositionedError("InvariantViolation", size_tok.pos, "creg size must be positive");
      creg_ = name.text;
      circuit_.num_clbits = size;
    }
  }

  int operand(const std::string& reg, int size, const char* what) {
    if (tok_.kind != Tok::Ident) syntax(std::string("expected a ") + what + " operand" + describe());
    Token name = take();
    if (reg.empty() || name.text != reg) {
      throw PositionedError("SyntaxError", name.pos, std::string("undeclared ") + what + " register '" + name.text + "'");
    }
    if (tok_.kind != Tok::Punct || tok_.text != "[") {
      throw PositionedError("UnsupportedStatement", name.pos, "whole-register operands are not supported");
    }
    take();
    Token idx_tok = tok_;
    int idx = number();
    expect("]");
    if (idx >= size) {
      throw PositionedError("IndexOutOfRange", idx_tok.pos,
                            name.text + "[" + std::to_string(idx) + "] is out of range (size " + std::to_string(size) + ")");
    }
    return idx;
  }

  int qubit() { return operand(qreg_, circuit_.num_qubits, "quantum"); }
  int clbit() { return operand(creg_, circuit_.num_clbits, "classical"); }

  void check_gate_args() {
    if (tok_.kind == Tok::Punct && tok_.text == "(") {
      throw PositionedError("UnsupportedStatement", tok_.pos, "parametrized gates are not supported");
    }
  }

  void single_qubit_gate() {
    Token kw = take();
    check_gate_args();
    int q = qubit();
    expect(";");
    OpKind kind = kw.text == "h" ? OpKind::H : kw.text == "x" ? OpKind::X : OpKind::Z;
    circuit_.ops.push_back({kind, {q}, std::nullopt});
  }

  void cx() {
    take();
    check_gate_args();
    int control = qubit();
    expect(",");
    Token target_tok = tok_;
    int target = qubit();
    expect(";");
    if (control == target) throw PositionedError("InvariantViolation", target_tok.pos, "CX qubits must be distinct");
    circuit_.ops.push_back(CircuitOp::cx(control, target));
  }

  void measure() {
    take();
    int q = qubit();
    if (tok_.kind != Tok::Arrow) syntax("expected '->'" + describe());
    take();
    int c = clbit();
    expect(";");
    circuit_.ops.push_back(CircuitOp::measure(q, c));
  }

  Lexer lex_;
  Token tok_;
  Circuit circuit_;
  std::string qreg_;
  std::string creg_;
  bool seen_body_ = false;
};

}  // namespace

Circuit parse_qasm(std::string_view text) { return Parser(text).parse(); }

std::string unparse_qasm(const Circuit& circuit) {
  std::string out = "OPENQASM 2.0;\n";
  out += "qreg q[" + std::to_string(circuit.num_qubits) + "];\n";
  if (circuit.num_clbits > 0) out += "creg c[" + std::to_string(circuit.num_clbits) + "];\n";
  for (const auto& op : circuit.ops) {
    auto q = [](int i) { return "q[" + std::to_string(i) + "]"; };
    switch (op.kind) {
      case OpKind::CX: out += "cx " + q(op.qubits[0]) + "," + q(op.qubits[1]) + ";\n"; break;
      case OpKind::Measure:
        out += "measure " + q(op.qubits[0]) + " -> c[" + std::to_string(*op.clbit) + "];\n";
        break;
      default: out += std::string(to_string(op.kind)) + " " + q(op.qubits[0]) + ";\n";
    }
  }
  return out;
}

}  // namespace q8s
