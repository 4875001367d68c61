#ifndef STRUCTRTL_RTL_PARSER_H_
#define STRUCTRTL_RTL_PARSER_H_

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "structrtl/rtl/ast.h"
#include "structrtl/rtl/token.h"

namespace structrtl::rtl {

// Parses every module declaration in `tokens`. Parameters are folded into
// constants during parsing, so the returned AST never references them.
// case/casez/casex statements are desugared into if/else chains over Eq
// comparisons (Or-combined for multi-label arms). Throws ParseError or
// UnsupportedConstruct.
std::vector<AstModule> Parse(const std::vector<Token>& tokens);

// Tokenize + Parse, requiring exactly one module.
AstModule ParseModule(std::string_view source);

// Folds a constant expression; nullopt when it references signals or
// divides by zero. Arithmetic is modulo 2^64.
std::optional<uint64_t> EvalConst(const Expr& e);

}  // namespace structrtl::rtl

#endif  // STRUCTRTL_RTL_PARSER_H_
