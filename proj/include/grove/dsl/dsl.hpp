#pragma once

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "grove/dsl/ast.hpp"
#include "grove/env/environment.hpp"

namespace grove::dsl {

// Grammar:
//   program := {binding} "return" expr
//   binding := IDENT "=" expr NEWLINE
//   expr    := term {("+"|"-") term}
//   term    := factor {("*"|"/") factor}
//   factor  := NUMBER | ref | call | "(" expr ")" | "-" factor
//   call    := ("exp"|"abs"|"norm"|"dot"|"min"|"max"|"clamp") "(" expr {"," expr} ")"
//   ref     := IDENT | IDENT "." CHANNEL ["." AXIS] | "action" "[" INT "]"
// CHANNEL is pos|rot|vel|angvel and AXIS is x|y|z|w. `#` starts a comment
// running to the end of the line; newlines inside brackets are ignored.
//
// Types: pos/vel/angvel are 3-vectors, rot is a quaternion (x, y, z, w); any
// axis access is a scalar. + and - need equal types; * takes at most one
// non-scalar side; / needs a scalar divisor. exp/abs take one scalar, norm
// one 3-vector, dot two 3-vectors, min/max two or more scalars, clamp
// (value, lo, hi) three scalars.

/// Parses and type-checks. Throws DslError (syntax, unknown-identifier for
/// unbound names, type-mismatch, non-finite-literal).
RewardProgram parse(std::string_view source);

/// Checks the program against an environment: joint names exist, action
/// indices are in range, literals are finite, total is scalar. Throws DslError.
void validate(const RewardProgram& program, const env::EnvSpec& spec);

/// Canonical source text. print(parse(print(p))) == print(p).
std::string print(const RewardProgram& program);
std::string print(const Expr& expr);

struct Evaluation {
    double total = 0.0;
    /// Every scalar-typed binding by name.
    std::map<std::string, double> components;
};

/// |denominator| below this is an evaluation error.
inline constexpr double kDivisionGuard = 1e-12;

/// Program lowered to a flat stack machine with joint names resolved against
/// one EnvSpec. Immutable and re-entrant.
class CompiledProgram {
public:
    CompiledProgram(const RewardProgram& program, const env::EnvSpec& spec);

    /// Throws EvalError naming the binding on a guarded division or a
    /// non-finite value; DimensionError-style std::invalid_argument when the
    /// state or action does not match the EnvSpec.
    Evaluation evaluate(const env::StateEmbed& embed, std::span<const double> action) const;

    const RewardProgram& program() const { return program_; }

    struct Instr {
        enum class Op { Const, Joint, Action, Load, Store, Neg, Add, Sub, Mul, Div, Call, Return };
        Op op = Op::Const;
        double value = 0.0;
        int a = 0;  // joint / action index / slot / func / arg count
        int b = 0;  // channel
        int c = -1; // axis
    };

private:
    RewardProgram program_;
    int num_joints_ = 0;
    int action_dim_ = 0;
    std::vector<Instr> code_;
    std::vector<std::string> slot_names_;
    std::vector<ValueType> slot_types_;
    int max_stack_ = 0;
};

/// Validate + compile + evaluate in one call.
Evaluation evaluate(const RewardProgram& program, const env::EnvSpec& spec, const env::StateEmbed& embed,
                    std::span<const double> action);

}  // namespace grove::dsl
