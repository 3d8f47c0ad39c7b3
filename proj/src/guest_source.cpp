// Copyright 2026 The evoheur Authors
// SPDX-License-Identifier: Apache-2.0

#include "evoheur/guest_source.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <set>

#include "evoheur/errors.hpp"

namespace evoheur::guest {
namespace {

constexpr std::array<std::string_view, 35> kKeywords = {
    "False", "None",   "True",     "and",   "as",     "assert", "async",
    "await", "break",  "class",    "continue", "def", "del",    "elif",
    "else",  "except", "finally",  "for",   "from",   "global", "if",
    "import", "in",    "is",       "lambda", "nonlocal", "not", "or",
    "pass",  "raise",  "return",   "try",   "while",  "with",   "yield"};

// Longest first so that greedy matching works.
constexpr std::array<std::string_view, 47> kOperators = {
    "**=", "//=", ">>=", "<<=", "...", "->", ":=", "**", "//", "<<", ">>", "<=",
    ">=",  "==",  "!=",  "+=",  "-=",  "*=", "/=", "%=", "&=", "|=", "^=", "@=",
    "+",   "-",   "*",   "/",   "%",   "@",  "&",  "|",  "^",  "~",  "<",  ">",
    "(",   ")",   "[",   "]",   "{",   "}",  ",",  ":",  ".",  ";",  "="};

bool ident_start(unsigned char c) { return std::isalpha(c) || c == '_' || c >= 0x80; }
bool ident_char(unsigned char c) { return std::isalnum(c) || c == '_' || c >= 0x80; }

bool string_prefix(std::string_view p) {
  std::string lower;
  for (char c : p) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  static const std::set<std::string> prefixes = {"r", "u", "b", "f", "br", "rb", "fr", "rf"};
  return prefixes.count(lower) > 0;
}

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    indents_.push_back(0);
    while (pos_ < src_.size()) {
      if (at_line_start_ && brackets_.empty()) {
        if (!begin_line()) continue;
      }
      lex_one();
    }
    if (!brackets_.empty()) {
      throw ParseError("unclosed '" + std::string(1, brackets_.back().first) + "'",
                       brackets_.back().second);
    }
    if (!out_.empty() && out_.back().kind != TokenKind::kNewline &&
        out_.back().kind != TokenKind::kDedent && out_.back().kind != TokenKind::kIndent) {
      emit(TokenKind::kNewline, "");
    }
    while (indents_.size() > 1) {
      indents_.pop_back();
      emit(TokenKind::kDedent, "");
    }
    emit(TokenKind::kEnd, "");
    return std::move(out_);
  }

 private:
  void emit(TokenKind kind, std::string text) { out_.push_back({kind, std::move(text), line_}); }

  // Handles indentation at the start of a physical line. Returns false when
  // the line was blank or comment-only and has been consumed.
  bool begin_line() {
    int col = 0;
    std::size_t p = pos_;
    while (p < src_.size() && (src_[p] == ' ' || src_[p] == '\t' || src_[p] == '\f')) {
      col = src_[p] == '\t' ? (col / 8 + 1) * 8 : (src_[p] == ' ' ? col + 1 : 0);
      ++p;
    }
    if (p >= src_.size() || src_[p] == '\n' || src_[p] == '\r' || src_[p] == '#') {
      while (p < src_.size() && src_[p] != '\n') ++p;
      if (p < src_.size()) ++p;
      pos_ = p;
      ++line_;
      return false;
    }
    pos_ = p;
    at_line_start_ = false;
    if (col > indents_.back()) {
      indents_.push_back(col);
      emit(TokenKind::kIndent, "");
    } else {
      while (col < indents_.back()) {
        indents_.pop_back();
        emit(TokenKind::kDedent, "");
      }
      if (col != indents_.back()) throw ParseError("inconsistent dedent", line_);
    }
    return true;
  }

  void end_line() {
    if (brackets_.empty()) {
      emit(TokenKind::kNewline, "");
      at_line_start_ = true;
    }
    ++line_;
  }

  void lex_one() {
    const char c = src_[pos_];
    if (c == ' ' || c == '\t' || c == '\f' || c == '\r') {
      ++pos_;
      return;
    }
    if (c == '\n') {
      ++pos_;
      end_line();
      return;
    }
    if (c == '#') {
      while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
      return;
    }
    if (c == '\\') {
      std::size_t p = pos_ + 1;
      if (p < src_.size() && src_[p] == '\r') ++p;
      if (p < src_.size() && src_[p] == '\n') {
        pos_ = p + 1;
        ++line_;
        return;
      }
      throw ParseError("unexpected character after line continuation", line_);
    }
    if (ident_start(static_cast<unsigned char>(c))) {
      std::size_t p = pos_;
      while (p < src_.size() && ident_char(static_cast<unsigned char>(src_[p]))) ++p;
      std::string_view word = src_.substr(pos_, p - pos_);
      if (p < src_.size() && (src_[p] == '\'' || src_[p] == '"') && string_prefix(word)) {
        lex_string(pos_, p);
        return;
      }
      out_.push_back({TokenKind::kName, std::string(word), line_});
      pos_ = p;
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '.' && pos_ + 1 < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])))) {
      lex_number();
      return;
    }
    if (c == '\'' || c == '"') {
      lex_string(pos_, pos_);
      return;
    }
    for (std::string_view op : kOperators) {
      if (src_.compare(pos_, op.size(), op) == 0) {
        track_bracket(op);
        out_.push_back({TokenKind::kOp, std::string(op), line_});
        pos_ += op.size();
        return;
      }
    }
    throw ParseError(std::string("invalid character '") + c + "'", line_);
  }

  void track_bracket(std::string_view op) {
    if (op == "(" || op == "[" || op == "{") {
      brackets_.emplace_back(op[0], line_);
    } else if (op == ")" || op == "]" || op == "}") {
      const char open = op == ")" ? '(' : (op == "]" ? '[' : '{');
      if (brackets_.empty() || brackets_.back().first != open) {
        throw ParseError("unmatched '" + std::string(op) + "'", line_);
      }
      brackets_.pop_back();
    }
  }

  void lex_number() {
    std::size_t p = pos_;
    if (src_[p] == '0' && p + 1 < src_.size() &&
        std::string_view("xXoObB").find(src_[p + 1]) != std::string_view::npos) {
      p += 2;
      while (p < src_.size() && (std::isxdigit(static_cast<unsigned char>(src_[p])) || src_[p] == '_')) ++p;
    } else {
      auto digits = [&] {
        while (p < src_.size() && (std::isdigit(static_cast<unsigned char>(src_[p])) || src_[p] == '_')) ++p;
      };
      digits();
      if (p < src_.size() && src_[p] == '.') {
        ++p;
        digits();
      }
      if (p < src_.size() && (src_[p] == 'e' || src_[p] == 'E')) {
        std::size_t q = p + 1;
        if (q < src_.size() && (src_[q] == '+' || src_[q] == '-')) ++q;
        if (q < src_.size() && std::isdigit(static_cast<unsigned char>(src_[q]))) {
          p = q;
          digits();
        }
      }
      if (p < src_.size() && (src_[p] == 'j' || src_[p] == 'J')) ++p;
    }
    if (p < src_.size() && ident_char(static_cast<unsigned char>(src_[p]))) {
      throw ParseError("invalid number literal", line_);
    }
    out_.push_back({TokenKind::kNumber, std::string(src_.substr(pos_, p - pos_)), line_});
    pos_ = p;
  }

  void lex_string(std::size_t start, std::size_t quote_pos) {
    const char q = src_[quote_pos];
    const bool triple = src_.compare(quote_pos, 3, std::string(3, q)) == 0;
    const int start_line = line_;
    std::size_t p = quote_pos + (triple ? 3 : 1);
    while (true) {
      if (p >= src_.size()) throw ParseError("unterminated string literal", start_line);
      const char c = src_[p];
      if (c == '\\') {
        if (p + 1 < src_.size() && src_[p + 1] == '\n') ++line_;
        p += 2;
        continue;
      }
      if (c == '\n') {
        if (!triple) throw ParseError("unterminated string literal", start_line);
        ++line_;
      }
      if (c == q) {
        if (!triple) {
          ++p;
          break;
        }
        if (src_.compare(p, 3, std::string(3, q)) == 0) {
          p += 3;
          break;
        }
      }
      ++p;
    }
    out_.push_back({TokenKind::kString, std::string(src_.substr(start, p - start)), start_line});
    pos_ = p;
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  bool at_line_start_ = true;
  std::vector<int> indents_;
  std::vector<std::pair<char, int>> brackets_;
  std::vector<Token> out_;
};

const std::set<std::string_view> kCompound = {"if", "elif", "else", "for", "while", "def",
                                              "class", "try", "except", "finally", "with",
                                              "async"};

bool is_op(const Token& t, std::string_view text) {
  return t.kind == TokenKind::kOp && t.text == text;
}

bool is_binary_tail(const Token& t) {
  if (t.kind == TokenKind::kName) {
    return t.text == "and" || t.text == "or" || t.text == "not" || t.text == "in" ||
           t.text == "is";
  }
  if (t.kind != TokenKind::kOp) return false;
  static const std::set<std::string_view> bad = {
      "=",  "+=", "-=", "*=", "/=", "//=", "%=", "**=", ">>=", "<<=", "&=", "|=",
      "^=", "@=", "+",  "-",  "*",  "/",   "//", "%",   "**",  "<<",  ">>", "&",
      "|",  "^",  "<",  ">",  "<=", ">=",  "==", "!=",  ".",   "->",  ":=", "@", "~"};
  return bad.count(t.text) > 0;
}

void check_simple(const std::vector<Token>& toks) {
  if (toks.empty()) return;
  const Token& first = toks.front();
  if (first.kind == TokenKind::kOp) {
    static const std::set<std::string_view> bad_start = {
        "=", ")", "]", "}", ",", ":", ".", ";", "+=", "-=", "*=", "/=", "==", "!=",
        "<", ">", "<=", ">=", "%", "/", "//", "|", "&", "^", "->", ":="};
    if (bad_start.count(first.text)) {
      throw ParseError("invalid syntax near '" + first.text + "'", first.line);
    }
  }
  if (first.kind == TokenKind::kName && kCompound.count(first.text)) {
    throw ParseError("misplaced '" + first.text + "'", first.line);
  }
  if (is_binary_tail(toks.back())) {
    throw ParseError("statement ends with '" + toks.back().text + "'", toks.back().line);
  }
  for (std::size_t i = 1; i < toks.size(); ++i) {
    const Token& a = toks[i - 1];
    const Token& b = toks[i];
    const bool a_atom = a.kind == TokenKind::kNumber || a.kind == TokenKind::kString ||
                        (a.kind == TokenKind::kName && !is_keyword(a.text));
    const bool b_atom = b.kind == TokenKind::kNumber ||
                        (b.kind == TokenKind::kName && !is_keyword(b.text));
    // Two adjacent operands ("x y", "1 2") never form valid Python.
    if (a_atom && b_atom && !(a.kind == TokenKind::kString && b.kind == TokenKind::kString)) {
      throw ParseError("invalid syntax near '" + b.text + "'", b.line);
    }
    if (is_op(a, "=") && is_op(b, "=")) throw ParseError("invalid syntax near '='", b.line);
  }
}

class Parser {
 public:
  explicit Parser(const std::vector<Token>& toks) : toks_(toks) {}

  std::vector<Statement> parse_module() {
    auto stmts = parse_block(/*top=*/true);
    if (peek().kind != TokenKind::kEnd) throw ParseError("unexpected dedent", peek().line);
    return stmts;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    return toks_[std::min(i_ + ahead, toks_.size() - 1)];
  }

  std::vector<Statement> parse_block(bool top) {
    std::vector<Statement> out;
    while (true) {
      const Token& t = peek();
      if (t.kind == TokenKind::kEnd) break;
      if (t.kind == TokenKind::kDedent) {
        if (top) throw ParseError("unexpected dedent", t.line);
        break;
      }
      if (t.kind == TokenKind::kIndent) throw ParseError("unexpected indent", t.line);
      if (t.kind == TokenKind::kNewline) {
        ++i_;
        continue;
      }
      parse_line(out);
    }
    return out;
  }

  // Collects tokens of one logical line, consuming the NEWLINE.
  std::vector<Token> take_line() {
    std::vector<Token> line;
    while (peek().kind != TokenKind::kNewline && peek().kind != TokenKind::kEnd) {
      line.push_back(toks_[i_++]);
    }
    if (peek().kind == TokenKind::kNewline) ++i_;
    return line;
  }

  static std::vector<std::vector<Token>> split_simple(const std::vector<Token>& toks,
                                                      std::size_t from) {
    std::vector<std::vector<Token>> parts(1);
    int depth = 0;
    for (std::size_t k = from; k < toks.size(); ++k) {
      const Token& t = toks[k];
      if (t.kind == TokenKind::kOp) {
        if (t.text == "(" || t.text == "[" || t.text == "{") ++depth;
        if (t.text == ")" || t.text == "]" || t.text == "}") --depth;
        if (depth == 0 && t.text == ";") {
          parts.emplace_back();
          continue;
        }
      }
      parts.back().push_back(t);
    }
    if (parts.size() > 1 && parts.back().empty()) parts.pop_back();
    for (const auto& p : parts) {
      if (p.empty()) throw ParseError("empty statement", toks.empty() ? 0 : toks.front().line);
    }
    return parts;
  }

  static Statement simple(std::vector<Token> toks) {
    check_simple(toks);
    Statement s;
    s.line = toks.front().line;
    if (toks.front().kind == TokenKind::kName && is_keyword(toks.front().text)) {
      s.keyword = toks.front().text;
    }
    s.tokens = std::move(toks);
    return s;
  }

  // Index of the ':' closing a compound header, or npos.
  static std::size_t header_colon(const std::vector<Token>& toks) {
    int depth = 0;
    int lambdas = 0;
    for (std::size_t k = 0; k < toks.size(); ++k) {
      const Token& t = toks[k];
      if (t.kind == TokenKind::kName && t.text == "lambda" && depth == 0) ++lambdas;
      if (t.kind != TokenKind::kOp) continue;
      if (t.text == "(" || t.text == "[" || t.text == "{") ++depth;
      if (t.text == ")" || t.text == "]" || t.text == "}") --depth;
      if (t.text == ":" && depth == 0) {
        if (lambdas > 0) {
          --lambdas;
          continue;
        }
        return k;
      }
    }
    return std::string::npos;
  }

  void parse_line(std::vector<Statement>& out) {
    std::vector<Token> line = take_line();
    if (line.empty()) return;
    const Token& head = line.front();
    std::string kw = head.kind == TokenKind::kName ? head.text : "";
    if (kw == "async" && line.size() > 1) kw = line[1].text;
    if (!kCompound.count(kw)) {
      for (auto& part : split_simple(line, 0)) out.push_back(simple(std::move(part)));
      return;
    }

    const std::size_t colon = header_colon(line);
    if (colon == std::string::npos) throw ParseError("expected ':' after '" + kw + "'", head.line);
    Statement s;
    s.line = head.line;
    s.keyword = kw;
    s.compound = true;
    s.tokens.assign(line.begin(), line.begin() + static_cast<std::ptrdiff_t>(colon) + 1);
    check_header(s, out);

    if (colon + 1 < line.size()) {
      for (auto& part : split_simple(line, colon + 1)) s.body.push_back(simple(std::move(part)));
    } else {
      if (peek().kind != TokenKind::kIndent) {
        throw ParseError("expected an indented block after '" + kw + "'", head.line);
      }
      ++i_;
      s.body = parse_block(/*top=*/false);
      if (peek().kind == TokenKind::kDedent) ++i_;
    }
    out.push_back(std::move(s));
  }

  static void check_header(const Statement& s, const std::vector<Statement>& siblings) {
    const auto& t = s.tokens;
    const std::string prev =
        siblings.empty() || !siblings.back().compound ? "" : siblings.back().keyword;
    const std::string& kw = s.keyword;
    auto need_prev = [&](std::initializer_list<std::string_view> allowed) {
      for (auto a : allowed) {
        if (prev == a) return;
      }
      throw ParseError("'" + kw + "' without a matching clause", s.line);
    };
    std::size_t start = t.front().text == "async" ? 1 : 0;
    const std::size_t body_len = t.size() - start - 1;  // tokens between keyword and ':'

    if (kw == "elif") need_prev({"if", "elif"});
    if (kw == "else") need_prev({"if", "elif", "for", "while", "try", "except"});
    if (kw == "except") need_prev({"try", "except"});
    if (kw == "finally") need_prev({"try", "except", "else"});
    if ((kw == "else" || kw == "try" || kw == "finally") && body_len != 1) {
      throw ParseError("invalid '" + kw + "' clause", s.line);
    }
    if ((kw == "if" || kw == "elif" || kw == "while" || kw == "with") && body_len < 2) {
      throw ParseError("'" + kw + "' needs an expression", s.line);
    }
    if (kw == "for") {
      bool has_in = false;
      int depth = 0;
      for (std::size_t k = start + 1; k + 1 < t.size(); ++k) {
        if (t[k].kind == TokenKind::kOp && (t[k].text == "(" || t[k].text == "[")) ++depth;
        if (t[k].kind == TokenKind::kOp && (t[k].text == ")" || t[k].text == "]")) --depth;
        if (depth == 0 && t[k].kind == TokenKind::kName && t[k].text == "in") has_in = true;
      }
      if (!has_in) throw ParseError("'for' without 'in'", s.line);
    }
    if (kw == "def") {
      if (t.size() < start + 5 || t[start + 1].kind != TokenKind::kName ||
          is_keyword(t[start + 1].text) || !is_op(t[start + 2], "(")) {
        throw ParseError("malformed function definition", s.line);
      }
    }
    if (kw == "class") {
      if (t.size() < start + 3 || t[start + 1].kind != TokenKind::kName ||
          is_keyword(t[start + 1].text)) {
        throw ParseError("malformed class definition", s.line);
      }
    }
  }

  const std::vector<Token>& toks_;
  std::size_t i_ = 0;
};

}  // namespace

bool is_keyword(std::string_view word) {
  return std::find(kKeywords.begin(), kKeywords.end(), word) != kKeywords.end();
}

std::vector<Token> tokenize(std::string_view source) { return Lexer(source).run(); }

Module parse(std::string_view source) {
  Module m;
  m.tokens = tokenize(source);
  m.statements = Parser(m.tokens).parse_module();
  return m;
}

std::vector<FunctionSignature> top_level_functions(const Module& m) {
  std::vector<FunctionSignature> out;
  for (const auto& s : m.statements) {
    if (s.keyword != "def") continue;
    const auto& t = s.tokens;
    const std::size_t start = t.front().text == "async" ? 1 : 0;
    FunctionSignature sig;
    sig.name = t[start + 1].text;
    sig.line = s.line;
    // Parameters live between the '(' at start+2 and its matching ')'.
    int depth = 0;
    bool at_param_start = true;
    bool skip_rest = false;
    for (std::size_t k = start + 3; k < t.size(); ++k) {
      const Token& tok = t[k];
      if (tok.kind == TokenKind::kOp) {
        if (tok.text == "(" || tok.text == "[" || tok.text == "{") ++depth;
        if (tok.text == ")" || tok.text == "]" || tok.text == "}") {
          if (depth == 0) break;
          --depth;
        }
        if (depth == 0 && tok.text == ",") {
          at_param_start = true;
          skip_rest = false;
          continue;
        }
        if (depth == 0 && at_param_start && (tok.text == "*" || tok.text == "**")) {
          sig.varargs = true;
          skip_rest = true;
          at_param_start = false;
          continue;
        }
        if (depth == 0 && at_param_start && tok.text == "/") {
          at_param_start = false;
          skip_rest = true;
          continue;
        }
      }
      if (at_param_start && !skip_rest && tok.kind == TokenKind::kName && depth == 0) {
        sig.params.push_back(tok.text);
      }
      at_param_start = false;
    }
    out.push_back(std::move(sig));
  }
  return out;
}

}  // namespace evoheur::guest
