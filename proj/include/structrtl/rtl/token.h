#ifndef STRUCTRTL_RTL_TOKEN_H_
#define STRUCTRTL_RTL_TOKEN_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "structrtl/rtl/diagnostics.h"

namespace structrtl::rtl {

enum class TokenKind { kKeyword, kIdentifier, kNumber, kOperator, kPunctuation, kEof };

std::string_view TokenKindName(TokenKind kind);

struct NumberLiteral {
  int width = 1;
  // True for literals with an explicit size prefix (4'b1010).
  bool sized = false;
  // Value bits, most significant first, exactly `width` long.
  std::string bits;

  // Low 64 bits of the value.
  uint64_t value() const;
};

struct Token {
  TokenKind kind = TokenKind::kEof;
  std::string text;
  int line = 1;
  int column = 1;
  // Byte offset of the first character in the source.
  size_t offset = 0;
  std::optional<NumberLiteral> number;

  SourceLoc loc() const { return {line, column}; }
  bool Is(TokenKind k, std::string_view t) const { return kind == k && text == t; }
};

// Splits Verilog source into tokens, dropping whitespace and comments.
// The returned sequence always ends with a kEof token. Throws LexError.
std::vector<Token> Tokenize(std::string_view source);

}  // namespace structrtl::rtl

#endif  // STRUCTRTL_RTL_TOKEN_H_
