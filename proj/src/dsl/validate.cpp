#include <cmath>

#include "grove/dsl/dsl.hpp"

namespace grove::dsl {
namespace {

void check(const Expr& e, const env::EnvSpec& spec) {
    switch (e.kind) {
        case ExprKind::Literal:
            if (!std::isfinite(e.value)) {
                throw DslError(ErrorKind::NonFiniteLiteral, e.pos, "literal is not finite");
            }
            break;
        case ExprKind::JointRef:
            if (spec.joint_index(e.name) < 0) {
                throw DslError(ErrorKind::UnknownIdentifier, e.pos,
                               "joint '" + e.name + "' does not exist in env '" + spec.name + "'");
            }
            break;
        case ExprKind::ActionRef:
            if (e.action_index < 0 || e.action_index >= spec.action_dim) {
                throw DslError(ErrorKind::UnknownIdentifier, e.pos,
                               "action[" + std::to_string(e.action_index) + "] is out of range; env '" + spec.name +
                                   "' has action_dim " + std::to_string(spec.action_dim));
            }
            break;
        default:
            break;
    }
    for (const auto& a : e.args) {
        check(a, spec);
    }
}

}  // namespace

void validate(const RewardProgram& program, const env::EnvSpec& spec) {
    for (const auto& b : program.bindings) {
        check(b.value, spec);
    }
    check(program.total, spec);
    if (program.total.type != ValueType::Scalar) {
        throw DslError(ErrorKind::TypeMismatch, program.total.pos, "the returned total must be a scalar");
    }
}

}  // namespace grove::dsl
