#include <algorithm>
#include <array>
#include <cctype>
#include <unordered_set>

#include "structrtl/rtl/token.h"

namespace structrtl::rtl {
namespace {

const std::unordered_set<std::string_view>& Keywords() {
  static const std::unordered_set<std::string_view> kKeywords = {
      "module",   "endmodule", "input",      "output",   "inout",       "wire",
      "reg",      "assign",    "always",     "posedge",  "negedge",     "or",
      "begin",    "end",       "if",         "else",     "case",        "casez",
      "casex",    "endcase",   "default",    "parameter", "localparam", "integer",
      "function", "endfunction", "generate", "endgenerate", "genvar",   "for",
      "while",    "repeat",    "forever",    "initial",  "signed",      "task",
      "endtask",  "logic",     "always_ff",  "always_comb"};
  return kKeywords;
}

// Longest first so that maximal munch picks e.g. "<<<" over "<<".
constexpr std::array<std::string_view, 35> kOperators = {
    "<<<", ">>>", "===", "!==", "<<", ">>", "<=", ">=", "==", "!=", "&&", "||",
    "~&",  "~|",  "~^",  "^~",  "**", "+:", "-:", "+",  "-",  "*",  "/",  "%",
    "<",   ">",   "!",   "~",   "&",  "|",  "^",  "?",  "=",  "@",  "#"};

constexpr std::string_view kPunctuation = "()[]{};,:.";

// Decimal digit string to MSB-first binary, via repeated halving.
std::string DecimalToBits(std::string digits) {
  std::string bits;
  auto is_zero = [&] { return std::all_of(digits.begin(), digits.end(), [](char c) { return c == '0'; }); };
  while (!digits.empty() && !is_zero()) {
    int carry = 0;
    std::string half;
    for (char c : digits) {
      const int cur = carry * 10 + (c - '0');
      half.push_back(static_cast<char>('0' + cur / 2));
      carry = cur % 2;
    }
    bits.push_back(static_cast<char>('0' + carry));
    const size_t first = half.find_first_not_of('0');
    digits = first == std::string::npos ? std::string() : half.substr(first);
  }
  if (bits.empty()) bits = "0";
  std::reverse(bits.begin(), bits.end());
  return bits;
}

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> Run() {
    std::vector<Token> out;
    while (true) {
      SkipTrivia();
      if (pos_ >= src_.size()) break;
      out.push_back(Next());
    }
    Token eof;
    eof.kind = TokenKind::kEof;
    eof.line = line_;
    eof.column = col_;
    eof.offset = pos_;
    out.push_back(eof);
    return out;
  }

 private:
  char Peek(size_t ahead = 0) const {
    return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
  }

  void Advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  SourceLoc Here() const { return {line_, col_}; }

  void SkipTrivia() {
    while (pos_ < src_.size()) {
      const char c = Peek();
      if (std::isspace(static_cast<unsigned char>(c))) {
        Advance();
      } else if (c == '/' && Peek(1) == '/') {
        while (pos_ < src_.size() && Peek() != '\n') Advance();
      } else if (c == '/' && Peek(1) == '*') {
        const SourceLoc start = Here();
        Advance();
        Advance();
        while (pos_ < src_.size() && !(Peek() == '*' && Peek(1) == '/')) Advance();
        if (pos_ >= src_.size()) throw LexError(start, "unterminated block comment");
        Advance();
        Advance();
      } else if (c == '`') {
        SkipDirective();
      } else {
        return;
      }
    }
  }

  void SkipDirective() {
    const SourceLoc start = Here();
    size_t end = pos_ + 1;
    while (end < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[end])) || src_[end] == '_')) ++end;
    const std::string_view name = src_.substr(pos_ + 1, end - pos_ - 1);
    if (name != "timescale" && name != "default_nettype") {
      throw LexError(start, "unsupported compiler directive `" + std::string(name));
    }
    while (pos_ < src_.size() && Peek() != '\n') Advance();
  }

  Token Make(TokenKind kind, size_t start, SourceLoc loc) {
    Token t;
    t.kind = kind;
    t.text = std::string(src_.substr(start, pos_ - start));
    t.line = loc.line;
    t.column = loc.column;
    t.offset = start;
    return t;
  }

  Token Next() {
    const size_t start = pos_;
    const SourceLoc loc = Here();
    const char c = Peek();

    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '$') {
      while (std::isalnum(static_cast<unsigned char>(Peek())) || Peek() == '_' || Peek() == '$') Advance();
      Token t = Make(TokenKind::kIdentifier, start, loc);
      if (Keywords().contains(t.text)) t.kind = TokenKind::kKeyword;
      return t;
    }
    if (c == '\\') throw LexError(loc, "escaped identifiers are not supported");
    if (std::isdigit(static_cast<unsigned char>(c)) || (c == '\'' && IsBaseChar(Peek(1)))) {
      return Number(start, loc);
    }
    for (std::string_view op : kOperators) {
      if (src_.substr(pos_, op.size()) == op) {
        for (size_t i = 0; i < op.size(); ++i) Advance();
        return Make(TokenKind::kOperator, start, loc);
      }
    }
    if (kPunctuation.find(c) != std::string_view::npos) {
      Advance();
      return Make(TokenKind::kPunctuation, start, loc);
    }
    if (c == '"') throw LexError(loc, "string literals are not supported");
    throw LexError(loc, std::string("illegal character '") + c + "'");
  }

  static bool IsBaseChar(char c) {
    const char l = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return l == 'b' || l == 'o' || l == 'd' || l == 'h' || l == 's';
  }

  std::string ReadDigits() {
    std::string digits;
    while (std::isalnum(static_cast<unsigned char>(Peek())) || Peek() == '_' || Peek() == '?') {
      if (Peek() != '_') digits.push_back(Peek());
      Advance();
    }
    return digits;
  }

  Token Number(size_t start, SourceLoc loc) {
    std::string size_digits;
    while (std::isdigit(static_cast<unsigned char>(Peek())) || Peek() == '_') {
      if (Peek() != '_') size_digits.push_back(Peek());
      Advance();
    }
    NumberLiteral lit;
    if (Peek() != '\'') {
      // Plain decimal: width is the minimal bit count of the value.
      if (std::isalpha(static_cast<unsigned char>(Peek()))) {
        throw LexError(loc, "malformed number literal");
      }
      lit.bits = DecimalToBits(size_digits);
      lit.width = static_cast<int>(lit.bits.size());
      lit.sized = false;
      Token t = Make(TokenKind::kNumber, start, loc);
      t.number = lit;
      return t;
    }
    Advance();  // '
    if (Peek() == 's' || Peek() == 'S') Advance();
    const char base = static_cast<char>(std::tolower(static_cast<unsigned char>(Peek())));
    if (base != 'b' && base != 'o' && base != 'd' && base != 'h') {
      throw LexError(loc, "malformed number literal: bad base");
    }
    Advance();
    const std::string digits = ReadDigits();
    if (digits.empty()) throw LexError(loc, "malformed number literal: no digits");

    std::string bits;
    const int digit_bits = base == 'b' ? 1 : base == 'o' ? 3 : base == 'h' ? 4 : 0;
    for (char d : digits) {
      const char l = static_cast<char>(std::tolower(static_cast<unsigned char>(d)));
      if (l == 'x' || l == 'z' || l == '?') {
        throw LexError(loc, "x/z literal digits are not supported");
      }
      int v;
      if (std::isdigit(static_cast<unsigned char>(l))) {
        v = l - '0';
      } else if (l >= 'a' && l <= 'f') {
        v = 10 + (l - 'a');
      } else {
        throw LexError(loc, "malformed number literal: bad digit '" + std::string(1, d) + "'");
      }
      const int radix = digit_bits == 0 ? 10 : 1 << digit_bits;
      if (v >= radix) {
        throw LexError(loc, "malformed number literal: digit '" + std::string(1, d) + "' out of range");
      }
      if (digit_bits > 0) {
        for (int b = digit_bits - 1; b >= 0; --b) bits.push_back(((v >> b) & 1) ? '1' : '0');
      }
    }
    if (digit_bits == 0) bits = DecimalToBits(digits);

    if (!size_digits.empty()) {
      if (size_digits.size() > 6) throw LexError(loc, "malformed number literal: size too large");
      const int width = std::stoi(size_digits);
      if (width < 1) throw LexError(loc, "malformed number literal: zero width");
      lit.width = width;
      lit.sized = true;
      if (static_cast<int>(bits.size()) >= width) {
        bits = bits.substr(bits.size() - width);
      } else {
        bits.insert(0, width - bits.size(), '0');
      }
    } else {
      lit.width = static_cast<int>(bits.size());
    }
    lit.bits = bits;
    Token t = Make(TokenKind::kNumber, start, loc);
    t.number = lit;
    return t;
  }

  std::string_view src_;
  size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

}  // namespace

std::string_view TokenKindName(TokenKind kind) {
  switch (kind) {
    case TokenKind::kKeyword:
      return "keyword";
    case TokenKind::kIdentifier:
      return "identifier";
    case TokenKind::kNumber:
      return "number";
    case TokenKind::kOperator:
      return "operator";
    case TokenKind::kPunctuation:
      return "punctuation";
    case TokenKind::kEof:
      return "end of file";
  }
  return "?";
}

uint64_t NumberLiteral::value() const {
  uint64_t v = 0;
  const size_t start = bits.size() > 64 ? bits.size() - 64 : 0;
  for (size_t i = start; i < bits.size(); ++i) v = (v << 1) | (bits[i] == '1' ? 1u : 0u);
  return v;
}

std::vector<Token> Tokenize(std::string_view source) { return Lexer(source).Run(); }

}  // namespace structrtl::rtl
