#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <optional>

#include "grove/dsl/dsl.hpp"
#include "lexer.hpp"

namespace grove::dsl {

DslError::DslError(ErrorKind kind, SourcePos pos, const std::string& message)
    : std::runtime_error(std::to_string(pos.line) + ":" + std::to_string(pos.column) + ": " +
                         std::string(to_string(kind)) + ": " + message),
      kind_(kind),
      pos_(pos),
      detail_(message) {}

EvalError::EvalError(std::string binding, const std::string& message)
    : std::runtime_error("evaluation of '" + binding + "' failed: " + message), binding_(std::move(binding)) {}

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Syntax: return "syntax";
        case ErrorKind::UnknownIdentifier: return "unknown-identifier";
        case ErrorKind::TypeMismatch: return "type-mismatch";
        case ErrorKind::NonFiniteLiteral: return "non-finite-literal";
    }
    return "error";
}

std::string_view to_string(Channel c) {
    switch (c) {
        case Channel::Pos: return "pos";
        case Channel::Rot: return "rot";
        case Channel::Vel: return "vel";
        case Channel::AngVel: return "angvel";
    }
    return "?";
}

std::string_view to_string(Func f) {
    switch (f) {
        case Func::Exp: return "exp";
        case Func::Abs: return "abs";
        case Func::Norm: return "norm";
        case Func::Dot: return "dot";
        case Func::Min: return "min";
        case Func::Max: return "max";
        case Func::Clamp: return "clamp";
    }
    return "?";
}

std::string_view to_string(ValueType t) {
    switch (t) {
        case ValueType::Scalar: return "scalar";
        case ValueType::Vec3: return "3-vector";
        case ValueType::Quat: return "quaternion";
    }
    return "?";
}

namespace {

std::optional<Func> func_named(std::string_view name) {
    static constexpr std::array<Func, 7> all = {Func::Exp, Func::Abs, Func::Norm, Func::Dot,
                                                Func::Min, Func::Max, Func::Clamp};
    for (Func f : all) {
        if (to_string(f) == name) {
            return f;
        }
    }
    return std::nullopt;
}

std::optional<Channel> channel_named(std::string_view name) {
    if (name == "pos") return Channel::Pos;
    if (name == "rot") return Channel::Rot;
    if (name == "vel") return Channel::Vel;
    if (name == "angvel") return Channel::AngVel;
    return std::nullopt;
}

int axis_named(std::string_view name) {
    if (name == "x") return 0;
    if (name == "y") return 1;
    if (name == "z") return 2;
    if (name == "w") return 3;
    return -1;
}

[[noreturn]] void mismatch(const Expr& e, const std::string& msg) { throw DslError(ErrorKind::TypeMismatch, e.pos, msg); }

void require(const Expr& e, ValueType want, std::string_view what) {
    if (e.type != want) {
        mismatch(e, std::string(what) + " needs a " + std::string(to_string(want)) + ", got a " +
                        std::string(to_string(e.type)));
    }
}

class Parser {
public:
    explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

    RewardProgram program() {
        RewardProgram prog;
        skip_newlines();
        while (peek().kind != Tok::Return) {
            if (peek().kind == Tok::End) {
                fail(peek(), "expected 'return' before end of input");
            }
            const Token& name = expect(Tok::Ident, "binding name");
            if (name.text == "action" || func_named(name.text)) {
                fail(name, "'" + name.text + "' is reserved and cannot be bound");
            }
            if (types_.count(name.text) != 0) {
                fail(name, "duplicate binding '" + name.text + "'");
            }
            expect(Tok::Assign, "'='");
            Binding b;
            b.name = name.text;
            b.pos = name.pos;
            b.value = expr();
            expect(Tok::Newline, "end of line after binding");
            skip_newlines();
            types_[b.name] = b.value.type;
            prog.bindings.push_back(std::move(b));
        }
        next();
        prog.total = expr();
        skip_newlines();
        if (peek().kind != Tok::End) {
            fail(peek(), "unexpected " + std::string(describe(peek().kind)) + " after return expression");
        }
        require(prog.total, ValueType::Scalar, "the returned total");
        return prog;
    }

private:
    const Token& peek(std::size_t ahead = 0) const { return toks_[std::min(pos_ + ahead, toks_.size() - 1)]; }
    const Token& next() {
        const Token& t = toks_[pos_];
        if (pos_ + 1 < toks_.size()) {
            ++pos_;
        }
        return t;
    }
    void skip_newlines() {
        while (peek().kind == Tok::Newline) {
            next();
        }
    }
    [[noreturn]] void fail(const Token& at, const std::string& msg) const {
        throw DslError(ErrorKind::Syntax, at.pos, msg);
    }
    const Token& expect(Tok kind, std::string_view what) {
        if (peek().kind != kind) {
            fail(peek(), "expected " + std::string(what) + ", found " + std::string(describe(peek().kind)));
        }
        return next();
    }

    Expr expr() {
        if (++depth_ > kMaxDepth) {
            fail(peek(), "expression nested too deeply");
        }
        struct Leave {
            int& d;
            ~Leave() { --d; }
        } leave{depth_};
        Expr lhs = term();
        while (peek().kind == Tok::Plus || peek().kind == Tok::Minus) {
            const Token& op = next();
            lhs = binary(op, std::move(lhs), term());
        }
        return lhs;
    }

    Expr term() {
        Expr lhs = factor();
        while (peek().kind == Tok::Star || peek().kind == Tok::Slash) {
            const Token& op = next();
            lhs = binary(op, std::move(lhs), factor());
        }
        return lhs;
    }

    Expr binary(const Token& op, Expr lhs, Expr rhs) {
        Expr e;
        e.kind = ExprKind::Binary;
        e.pos = op.pos;
        e.op = op.text[0];
        const ValueType a = lhs.type;
        const ValueType b = rhs.type;
        switch (e.op) {
            case '+':
            case '-':
                if (a != b) {
                    mismatch(e, "operands of '" + op.text + "' must have the same type (" +
                                    std::string(to_string(a)) + " vs " + std::string(to_string(b)) + ")");
                }
                e.type = a;
                break;
            case '*':
                if (a != ValueType::Scalar && b != ValueType::Scalar) {
                    mismatch(e, "'*' needs at least one scalar operand");
                }
                e.type = a == ValueType::Scalar ? b : a;
                break;
            default:
                if (b != ValueType::Scalar) {
                    mismatch(e, "'/' needs a scalar divisor");
                }
                e.type = a;
                break;
        }
        e.args.push_back(std::move(lhs));
        e.args.push_back(std::move(rhs));
        return e;
    }

    Expr factor() {
        const Token& t = peek();
        switch (t.kind) {
            case Tok::Number: {
                next();
                Expr e;
                e.kind = ExprKind::Literal;
                e.pos = t.pos;
                e.value = t.number;
                return e;
            }
            case Tok::Minus: {
                next();
                if (++depth_ > kMaxDepth) {
                    fail(t, "expression nested too deeply");
                }
                struct Leave {
                    int& d;
                    ~Leave() { --d; }
                } leave{depth_};
                Expr e;
                e.kind = ExprKind::Neg;
                e.pos = t.pos;
                e.args.push_back(factor());
                e.type = e.args[0].type;
                return e;
            }
            case Tok::LParen: {
                next();
                Expr e = expr();
                expect(Tok::RParen, "')'");
                return e;
            }
            case Tok::Ident:
                return reference();
            default:
                fail(t, "expected an expression, found " + std::string(describe(t.kind)));
        }
    }

    Expr reference() {
        const Token& id = next();
        Expr e;
        e.pos = id.pos;
        if (id.text == "action") {
            expect(Tok::LBracket, "'[' after 'action'");
            const Token& idx = expect(Tok::Number, "action index");
            if (!idx.integral || idx.number > std::numeric_limits<int>::max()) {
                fail(idx, "action index must be a non-negative integer");
            }
            expect(Tok::RBracket, "']'");
            e.kind = ExprKind::ActionRef;
            e.action_index = static_cast<int>(idx.number);
            return e;
        }
        if (auto f = func_named(id.text)) {
            if (peek().kind != Tok::LParen) {
                fail(peek(), "expected '(' after function '" + id.text + "'");
            }
            next();
            e.kind = ExprKind::Call;
            e.func = *f;
            e.args.push_back(expr());
            while (peek().kind == Tok::Comma) {
                next();
                e.args.push_back(expr());
            }
            expect(Tok::RParen, "')' closing call");
            check_call(e);
            return e;
        }
        if (peek().kind == Tok::Dot) {
            next();
            const Token& ch = expect(Tok::Ident, "channel (pos, rot, vel, angvel)");
            const auto channel = channel_named(ch.text);
            if (!channel) {
                fail(ch, "unknown channel '" + ch.text + "' (expected pos, rot, vel or angvel)");
            }
            e.kind = ExprKind::JointRef;
            e.name = id.text;
            e.channel = *channel;
            e.type = *channel == Channel::Rot ? ValueType::Quat : ValueType::Vec3;
            if (peek().kind == Tok::Dot) {
                next();
                const Token& ax = expect(Tok::Ident, "axis (x, y, z, w)");
                e.axis = axis_named(ax.text);
                if (e.axis < 0) {
                    fail(ax, "unknown axis '" + ax.text + "' (expected x, y, z or w)");
                }
                if (e.axis == 3 && *channel != Channel::Rot) {
                    throw DslError(ErrorKind::TypeMismatch, ax.pos,
                                   "axis 'w' only exists on rot, not " + std::string(to_string(*channel)));
                }
                e.type = ValueType::Scalar;
            }
            return e;
        }
        const auto it = types_.find(id.text);
        if (it == types_.end()) {
            throw DslError(ErrorKind::UnknownIdentifier, id.pos, "'" + id.text + "' is not a prior binding");
        }
        e.kind = ExprKind::NameRef;
        e.name = id.text;
        e.type = it->second;
        return e;
    }

    static void check_call(Expr& e) {
        const std::string fname(to_string(e.func));
        auto arity = [&](std::size_t lo, std::size_t hi) {
            if (e.args.size() < lo || e.args.size() > hi) {
                const std::string want = lo == hi ? std::to_string(lo) : std::to_string(lo) + " or more";
                mismatch(e, fname + " takes " + want + " argument(s), got " + std::to_string(e.args.size()));
            }
        };
        constexpr auto many = std::numeric_limits<std::size_t>::max();
        switch (e.func) {
            case Func::Exp:
            case Func::Abs:
                arity(1, 1);
                require(e.args[0], ValueType::Scalar, fname);
                break;
            case Func::Norm:
                arity(1, 1);
                require(e.args[0], ValueType::Vec3, fname);
                break;
            case Func::Dot:
                arity(2, 2);
                require(e.args[0], ValueType::Vec3, fname);
                require(e.args[1], ValueType::Vec3, fname);
                break;
            case Func::Min:
            case Func::Max:
                arity(2, many);
                for (const auto& a : e.args) {
                    require(a, ValueType::Scalar, fname);
                }
                break;
            case Func::Clamp:
                arity(3, 3);
                for (const auto& a : e.args) {
                    require(a, ValueType::Scalar, fname);
                }
                break;
        }
        e.type = ValueType::Scalar;
    }

    static constexpr int kMaxDepth = 200;

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    int depth_ = 0;
    std::map<std::string, ValueType> types_;
};

}  // namespace

RewardProgram parse(std::string_view source) { return Parser(tokenize(source)).program(); }

}  // namespace grove::dsl
