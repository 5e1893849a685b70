#include "lexer.hpp"

#include <cctype>
#include <charconv>
#include <cmath>

namespace grove::dsl {

std::string_view describe(Tok kind) {
    switch (kind) {
        case Tok::Ident: return "identifier";
        case Tok::Number: return "number";
        case Tok::Return: return "'return'";
        case Tok::Newline: return "newline";
        case Tok::Plus: return "'+'";
        case Tok::Minus: return "'-'";
        case Tok::Star: return "'*'";
        case Tok::Slash: return "'/'";
        case Tok::LParen: return "'('";
        case Tok::RParen: return "')'";
        case Tok::LBracket: return "'['";
        case Tok::RBracket: return "']'";
        case Tok::Comma: return "','";
        case Tok::Dot: return "'.'";
        case Tok::Assign: return "'='";
        case Tok::End: return "end of input";
    }
    return "token";
}

std::vector<Token> tokenize(std::string_view src) {
    std::vector<Token> out;
    std::size_t i = 0;
    int line = 1;
    int col = 1;
    int depth = 0;

    auto push = [&](Tok kind, std::string text, SourcePos pos) {
        if (kind == Tok::Newline && (depth > 0 || out.empty() || out.back().kind == Tok::Newline)) {
            return;
        }
        Token t;
        t.kind = kind;
        t.text = std::move(text);
        t.pos = pos;
        out.push_back(std::move(t));
    };
    auto advance = [&](std::size_t n) {
        i += n;
        col += static_cast<int>(n);
    };

    while (i < src.size()) {
        const char ch = src[i];
        const SourcePos pos{line, col};
        if (ch == '\n') {
            push(Tok::Newline, "\n", pos);
            ++i;
            ++line;
            col = 1;
            continue;
        }
        if (ch == ' ' || ch == '\t' || ch == '\r') {
            advance(1);
            continue;
        }
        if (ch == '#') {
            while (i < src.size() && src[i] != '\n') {
                advance(1);
            }
            continue;
        }
        const auto uch = static_cast<unsigned char>(ch);
        if (std::isalpha(uch) || ch == '_') {
            std::size_t j = i;
            while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) {
                ++j;
            }
            std::string word(src.substr(i, j - i));
            push(word == "return" ? Tok::Return : Tok::Ident, word, pos);
            advance(j - i);
            continue;
        }
        const bool leading_dot_number =
            ch == '.' && i + 1 < src.size() && std::isdigit(static_cast<unsigned char>(src[i + 1])) &&
            (out.empty() || (out.back().kind != Tok::Ident && out.back().kind != Tok::RParen &&
                             out.back().kind != Tok::RBracket));
        if (std::isdigit(uch) || leading_dot_number) {
            std::size_t j = i;
            bool integral = true;
            while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) {
                ++j;
            }
            if (j < src.size() && src[j] == '.') {
                integral = false;
                ++j;
                while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) {
                    ++j;
                }
            }
            if (j < src.size() && (src[j] == 'e' || src[j] == 'E')) {
                std::size_t k = j + 1;
                if (k < src.size() && (src[k] == '+' || src[k] == '-')) {
                    ++k;
                }
                if (k < src.size() && std::isdigit(static_cast<unsigned char>(src[k]))) {
                    integral = false;
                    while (k < src.size() && std::isdigit(static_cast<unsigned char>(src[k]))) {
                        ++k;
                    }
                    j = k;
                }
            }
            const std::string text(src.substr(i, j - i));
            double value = 0.0;
            const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
            if (res.ec == std::errc::result_out_of_range) {
                value = std::strtod(text.c_str(), nullptr);
            } else if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
                throw DslError(ErrorKind::Syntax, pos, "malformed number '" + text + "'");
            }
            if (!std::isfinite(value)) {
                throw DslError(ErrorKind::NonFiniteLiteral, pos, "literal '" + text + "' is not finite");
            }
            Token t;
            t.kind = Tok::Number;
            t.text = text;
            t.number = value;
            t.integral = integral;
            t.pos = pos;
            out.push_back(std::move(t));
            advance(j - i);
            continue;
        }
        Tok kind = Tok::End;
        switch (ch) {
            case '+': kind = Tok::Plus; break;
            case '-': kind = Tok::Minus; break;
            case '*': kind = Tok::Star; break;
            case '/': kind = Tok::Slash; break;
            case '(': kind = Tok::LParen; ++depth; break;
            case ')': kind = Tok::RParen; depth = depth > 0 ? depth - 1 : 0; break;
            case '[': kind = Tok::LBracket; ++depth; break;
            case ']': kind = Tok::RBracket; depth = depth > 0 ? depth - 1 : 0; break;
            case ',': kind = Tok::Comma; break;
            case '.': kind = Tok::Dot; break;
            case '=': kind = Tok::Assign; break;
            default: {
                std::string shown = std::isprint(uch) ? std::string(1, ch) : "\\x" + std::to_string(uch);
                throw DslError(ErrorKind::Syntax, pos, "unexpected character '" + shown + "'");
            }
        }
        push(kind, std::string(1, ch), pos);
        advance(1);
    }
    push(Tok::Newline, "\n", {line, col});
    Token end;
    end.kind = Tok::End;
    end.pos = {line, col};
    out.push_back(end);
    return out;
}

}  // namespace grove::dsl
