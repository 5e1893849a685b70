#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace grove::dsl {

struct SourcePos {
    int line = 1;
    int column = 1;
};

enum class ErrorKind { Syntax, UnknownIdentifier, TypeMismatch, NonFiniteLiteral };

std::string_view to_string(ErrorKind kind);

/// Parse or validation failure. The position points into the source text.
class DslError : public std::runtime_error {
public:
    DslError(ErrorKind kind, SourcePos pos, const std::string& message);

    ErrorKind kind() const { return kind_; }
    SourcePos pos() const { return pos_; }
    const std::string& detail() const { return detail_; }

private:
    ErrorKind kind_;
    SourcePos pos_;
    std::string detail_;
};

/// Runtime failure while evaluating a validated program (guarded division,
/// non-finite intermediate). `binding()` is "return" for the total.
class EvalError : public std::runtime_error {
public:
    EvalError(std::string binding, const std::string& message);
    const std::string& binding() const { return binding_; }

private:
    std::string binding_;
};

enum class Channel { Pos, Rot, Vel, AngVel };
enum class Func { Exp, Abs, Norm, Dot, Min, Max, Clamp };
enum class ValueType { Scalar, Vec3, Quat };

std::string_view to_string(Channel c);
std::string_view to_string(Func f);
std::string_view to_string(ValueType t);

enum class ExprKind { Literal, JointRef, ActionRef, NameRef, Neg, Binary, Call };

struct Expr {
    ExprKind kind = ExprKind::Literal;
    SourcePos pos;
    double value = 0.0;           // Literal
    std::string name;             // JointRef joint, NameRef binding
    Channel channel = Channel::Pos;
    int axis = -1;                // JointRef: -1 whole channel, 0..3 = x,y,z,w
    int action_index = 0;         // ActionRef
    char op = '+';                // Binary: + - * /
    Func func = Func::Exp;        // Call
    std::vector<Expr> args;       // Neg: 1, Binary: 2, Call: n
    ValueType type = ValueType::Scalar;  // filled in by the type checker
};

struct Binding {
    std::string name;
    Expr value;
    SourcePos pos;
};

/// Immutable after parse(): bindings in source order, then the total.
struct RewardProgram {
    std::vector<Binding> bindings;
    Expr total;
};

}  // namespace grove::dsl
