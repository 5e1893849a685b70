#include <algorithm>
#include <array>
#include <cmath>
#include <map>

#include "grove/dsl/dsl.hpp"

namespace grove::dsl {
namespace {

using Instr = CompiledProgram::Instr;
using Op = Instr::Op;

struct Value {
    std::array<double, 4> v{};
    int width = 1;
};

class Compiler {
public:
    Compiler(const env::EnvSpec& spec, const std::map<std::string, int>& slots, std::vector<Instr>& code)
        : spec_(spec), slots_(slots), code_(code) {}

    int lower(const Expr& e) {
        int peak = 0;
        lower(e, 0, peak);
        return peak;
    }

private:
    void lower(const Expr& e, int depth, int& peak) {
        peak = std::max(peak, depth + 1);
        Instr in;
        switch (e.kind) {
            case ExprKind::Literal:
                in.op = Op::Const;
                in.value = e.value;
                break;
            case ExprKind::JointRef:
                in.op = Op::Joint;
                in.a = spec_.joint_index(e.name);
                in.b = static_cast<int>(e.channel);
                in.c = e.axis;
                break;
            case ExprKind::ActionRef:
                in.op = Op::Action;
                in.a = e.action_index;
                break;
            case ExprKind::NameRef:
                in.op = Op::Load;
                in.a = slots_.at(e.name);
                break;
            case ExprKind::Neg:
                lower(e.args[0], depth, peak);
                in.op = Op::Neg;
                break;
            case ExprKind::Binary:
                lower(e.args[0], depth, peak);
                lower(e.args[1], depth + 1, peak);
                in.op = e.op == '+' ? Op::Add : e.op == '-' ? Op::Sub : e.op == '*' ? Op::Mul : Op::Div;
                break;
            case ExprKind::Call:
                for (std::size_t i = 0; i < e.args.size(); ++i) {
                    lower(e.args[i], depth + static_cast<int>(i), peak);
                }
                in.op = Op::Call;
                in.a = static_cast<int>(e.func);
                in.b = static_cast<int>(e.args.size());
                break;
        }
        code_.push_back(in);
    }

    const env::EnvSpec& spec_;
    const std::map<std::string, int>& slots_;
    std::vector<Instr>& code_;
};

Value load_joint(const env::JointState& j, Channel channel, int axis) {
    Value out;
    switch (channel) {
        case Channel::Pos: out.v = {j.pos.x(), j.pos.y(), j.pos.z(), 0.0}; out.width = 3; break;
        case Channel::Vel: out.v = {j.vel.x(), j.vel.y(), j.vel.z(), 0.0}; out.width = 3; break;
        case Channel::AngVel: out.v = {j.ang_vel.x(), j.ang_vel.y(), j.ang_vel.z(), 0.0}; out.width = 3; break;
        case Channel::Rot: out.v = {j.rot.x(), j.rot.y(), j.rot.z(), j.rot.w()}; out.width = 4; break;
    }
    if (axis >= 0) {
        out.v = {out.v[axis], 0.0, 0.0, 0.0};
        out.width = 1;
    }
    return out;
}

bool finite(const Value& x) {
    for (int i = 0; i < x.width; ++i) {
        if (!std::isfinite(x.v[i])) {
            return false;
        }
    }
    return true;
}

}  // namespace

CompiledProgram::CompiledProgram(const RewardProgram& program, const env::EnvSpec& spec)
    : program_(program), num_joints_(spec.num_joints()), action_dim_(spec.action_dim) {
    validate(program_, spec);
    std::map<std::string, int> slots;
    Compiler compiler(spec, slots, code_);
    for (const auto& b : program_.bindings) {
        max_stack_ = std::max(max_stack_, compiler.lower(b.value));
        const int slot = static_cast<int>(slot_names_.size());
        Instr store;
        store.op = Op::Store;
        store.a = slot;
        code_.push_back(store);
        slots[b.name] = slot;
        slot_names_.push_back(b.name);
        slot_types_.push_back(b.value.type);
    }
    max_stack_ = std::max(max_stack_, compiler.lower(program_.total));
    Instr ret;
    ret.op = Op::Return;
    code_.push_back(ret);
}

Evaluation CompiledProgram::evaluate(const env::StateEmbed& embed, std::span<const double> action) const {
    if (static_cast<int>(embed.joints.size()) != num_joints_) {
        throw env::DimensionError("reward program expects " + std::to_string(num_joints_) + " joints, state has " +
                                  std::to_string(embed.joints.size()));
    }
    if (static_cast<int>(action.size()) != action_dim_) {
        throw env::DimensionError("reward program expects an action of length " + std::to_string(action_dim_) +
                                  ", got " + std::to_string(action.size()));
    }

    std::vector<Value> stack(static_cast<std::size_t>(max_stack_) + 1);
    std::vector<Value> slots(slot_names_.size());
    int sp = 0;
    std::size_t current = 0;  // binding being evaluated; == size() for the total
    auto where = [&]() -> std::string {
        return current < slot_names_.size() ? slot_names_[current] : std::string("return");
    };

    Evaluation result;
    for (const Instr& in : code_) {
        switch (in.op) {
            case Op::Const:
                stack[sp++] = Value{{in.value, 0.0, 0.0, 0.0}, 1};
                break;
            case Op::Joint:
                stack[sp++] = load_joint(embed.joints[in.a], static_cast<Channel>(in.b), in.c);
                break;
            case Op::Action:
                stack[sp++] = Value{{action[in.a], 0.0, 0.0, 0.0}, 1};
                break;
            case Op::Load:
                stack[sp++] = slots[in.a];
                break;
            case Op::Store: {
                const Value& v = stack[--sp];
                if (!finite(v)) {
                    throw EvalError(where(), "value is not finite");
                }
                slots[in.a] = v;
                if (v.width == 1) {
                    result.components[slot_names_[in.a]] = v.v[0];
                }
                ++current;
                break;
            }
            case Op::Neg: {
                Value& x = stack[sp - 1];
                for (int i = 0; i < x.width; ++i) {
                    x.v[i] = -x.v[i];
                }
                break;
            }
            case Op::Add:
            case Op::Sub: {
                const Value rhs = stack[--sp];
                Value& lhs = stack[sp - 1];
                for (int i = 0; i < lhs.width; ++i) {
                    lhs.v[i] = in.op == Op::Add ? lhs.v[i] + rhs.v[i] : lhs.v[i] - rhs.v[i];
                }
                break;
            }
            case Op::Mul: {
                const Value rhs = stack[--sp];
                Value& lhs = stack[sp - 1];
                if (lhs.width == 1) {
                    const double s = lhs.v[0];
                    lhs = rhs;
                    for (int i = 0; i < lhs.width; ++i) {
                        lhs.v[i] = s * rhs.v[i];
                    }
                } else {
                    for (int i = 0; i < lhs.width; ++i) {
                        lhs.v[i] = lhs.v[i] * rhs.v[0];
                    }
                }
                break;
            }
            case Op::Div: {
                const double den = stack[--sp].v[0];
                if (!(std::abs(den) >= kDivisionGuard)) {
                    throw EvalError(where(), "division by a value with magnitude below 1e-12");
                }
                Value& lhs = stack[sp - 1];
                for (int i = 0; i < lhs.width; ++i) {
                    lhs.v[i] = lhs.v[i] / den;
                }
                break;
            }
            case Op::Call: {
                const int argc = in.b;
                Value* args = &stack[sp - argc];
                double r = 0.0;
                switch (static_cast<Func>(in.a)) {
                    case Func::Exp: r = std::exp(args[0].v[0]); break;
                    case Func::Abs: r = std::abs(args[0].v[0]); break;
                    case Func::Norm: {
                        const auto& v = args[0].v;
                        r = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
                        break;
                    }
                    case Func::Dot: {
                        const auto& a = args[0].v;
                        const auto& b = args[1].v;
                        r = a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
                        break;
                    }
                    case Func::Min:
                        r = args[0].v[0];
                        for (int i = 1; i < argc; ++i) {
                            r = std::min(r, args[i].v[0]);
                        }
                        break;
                    case Func::Max:
                        r = args[0].v[0];
                        for (int i = 1; i < argc; ++i) {
                            r = std::max(r, args[i].v[0]);
                        }
                        break;
                    case Func::Clamp:
                        r = std::min(std::max(args[0].v[0], args[1].v[0]), args[2].v[0]);
                        break;
                }
                sp -= argc;
                stack[sp++] = Value{{r, 0.0, 0.0, 0.0}, 1};
                break;
            }
            case Op::Return: {
                const Value& v = stack[--sp];
                if (!std::isfinite(v.v[0])) {
                    throw EvalError("return", "total is not finite");
                }
                result.total = v.v[0];
                break;
            }
        }
    }
    return result;
}

Evaluation evaluate(const RewardProgram& program, const env::EnvSpec& spec, const env::StateEmbed& embed,
                    std::span<const double> action) {
    return CompiledProgram(program, spec).evaluate(embed, action);
}

}  // namespace grove::dsl
