#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "grove/dsl/ast.hpp"

namespace grove::dsl {

enum class Tok { Ident, Number, Return, Newline, Plus, Minus, Star, Slash, LParen, RParen, LBracket, RBracket,
                 Comma, Dot, Assign, End };

struct Token {
    Tok kind = Tok::End;
    std::string text;
    double number = 0.0;
    bool integral = false;
    SourcePos pos;
};

/// Throws DslError(Syntax) on characters outside the language. Consecutive
/// newlines collapse; newlines inside () or [] are dropped.
std::vector<Token> tokenize(std::string_view source);

std::string_view describe(Tok kind);

}  // namespace grove::dsl
