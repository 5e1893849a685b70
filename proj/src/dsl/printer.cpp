#include <array>
#include <charconv>

#include "grove/dsl/dsl.hpp"

namespace grove::dsl {
namespace {

constexpr int kAdditive = 1;
constexpr int kMultiplicative = 2;
constexpr int kUnary = 3;
constexpr int kAtom = 4;

int precedence(const Expr& e) {
    switch (e.kind) {
        case ExprKind::Binary: return (e.op == '+' || e.op == '-') ? kAdditive : kMultiplicative;
        case ExprKind::Neg: return kUnary;
        default: return kAtom;
    }
}

std::string number(double v) {
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    std::string s(buf.data(), res.ptr);
    // Keep literals visibly real-valued so they never read as action indices.
    if (s.find_first_of(".e") == std::string::npos) {
        s += ".0";
    }
    return s;
}

void emit(const Expr& e, std::string& out);

void emit_child(const Expr& child, int min_prec, std::string& out) {
    if (precedence(child) < min_prec) {
        out += '(';
        emit(child, out);
        out += ')';
    } else {
        emit(child, out);
    }
}

void emit(const Expr& e, std::string& out) {
    switch (e.kind) {
        case ExprKind::Literal:
            out += number(e.value);
            break;
        case ExprKind::JointRef:
            out += e.name;
            out += '.';
            out += to_string(e.channel);
            if (e.axis >= 0) {
                out += '.';
                out += "xyzw"[e.axis];
            }
            break;
        case ExprKind::ActionRef:
            out += "action[" + std::to_string(e.action_index) + "]";
            break;
        case ExprKind::NameRef:
            out += e.name;
            break;
        case ExprKind::Neg:
            out += '-';
            emit_child(e.args[0], kUnary, out);
            break;
        case ExprKind::Binary: {
            const int p = precedence(e);
            emit_child(e.args[0], p, out);
            out += ' ';
            out += e.op;
            out += ' ';
            // Right operands bind tighter: a - (b - c) and a + (b + c) keep their grouping.
            emit_child(e.args[1], p + 1, out);
            break;
        }
        case ExprKind::Call:
            out += to_string(e.func);
            out += '(';
            for (std::size_t i = 0; i < e.args.size(); ++i) {
                if (i > 0) {
                    out += ", ";
                }
                emit(e.args[i], out);
            }
            out += ')';
            break;
    }
}

}  // namespace

std::string print(const Expr& expr) {
    std::string out;
    emit(expr, out);
    return out;
}

std::string print(const RewardProgram& program) {
    std::string out;
    for (const auto& b : program.bindings) {
        out += b.name;
        out += " = ";
        emit(b.value, out);
        out += '\n';
    }
    out += "return ";
    emit(program.total, out);
    out += '\n';
    return out;
}

}  // namespace grove::dsl
