#include "oscihom/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>

namespace oscihom {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

class ExprParser {
public:
    explicit ExprParser(const std::string& src) : src_(src) {}

    Expr run() {
        Expr e;
        e.source_ = src_;
        code_ = &e.code_;
        xm_ = &e.x_mask_;
        ym_ = &e.y_mask_;
        parse_expr();
        skip_ws();
        if (pos_ != src_.size()) throw ParseError("trailing input", pos_);
        if (code_->empty()) throw ParseError("empty expression", 0);
        if (max_depth_ > 63) throw ParseError("expression too deeply nested", 0);
        e.max_depth_ = max_depth_;
        return e;
    }

private:
    const std::string& src_;
    std::size_t pos_ = 0;
    std::vector<Expr::Instr>* code_ = nullptr;
    unsigned* xm_ = nullptr;
    unsigned* ym_ = nullptr;
    int depth_ = 0;
    int max_depth_ = 0;

    void emit(Expr::Op op, double v = 0.0, int index = 0, int pos = 0, int stack_delta = 0) {
        code_->push_back({op, v, index, pos});
        depth_ += stack_delta;
        if (depth_ > max_depth_) max_depth_ = depth_;
    }

    void skip_ws() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }
    bool eat(char c) {
        skip_ws();
        if (pos_ < src_.size() && src_[pos_] == c) { ++pos_; return true; }
        return false;
    }
    char peek() {
        skip_ws();
        return pos_ < src_.size() ? src_[pos_] : '\0';
    }

    void parse_expr() {
        parse_term();
        for (;;) {
            skip_ws();
            if (eat('+')) { parse_term(); emit(Expr::Op::Add, 0, 0, int(pos_), -1); }
            else if (eat('-')) { parse_term(); emit(Expr::Op::Sub, 0, 0, int(pos_), -1); }
            else break;
        }
    }

    void parse_term() {
        parse_factor();
        for (;;) {
            skip_ws();
            if (eat('*')) { parse_factor(); emit(Expr::Op::Mul, 0, 0, int(pos_), -1); }
            else if (eat('/')) { int p = int(pos_); parse_factor(); emit(Expr::Op::Div, 0, 0, p, -1); }
            else break;
        }
    }

    void parse_factor() {
        int signs = 0;
        for (;;) {
            char c = peek();
            if (c == '-') { ++signs; ++pos_; }
            else if (c == '+') { ++pos_; }
            else break;
        }
        parse_power();
        if (signs % 2) emit(Expr::Op::Neg);
    }

    void parse_power() {
        parse_atom();
        if (eat('^')) {
            parse_factor(); // right associative, allows -x^-2
            emit(Expr::Op::Pow, 0, 0, int(pos_), -1);
        }
    }

    void parse_atom() {
        skip_ws();
        if (pos_ >= src_.size()) throw ParseError("unexpected end of expression", pos_);
        char c = src_[pos_];
        if (c == '(') {
            ++pos_;
            parse_expr();
            if (!eat(')')) throw ParseError("expected ')'", pos_);
            return;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            const char* begin = src_.c_str() + pos_;
            char* end = nullptr;
            double v = std::strtod(begin, &end);
            if (end == begin) throw ParseError("bad number", pos_);
            pos_ += std::size_t(end - begin);
            emit(Expr::Op::Const, v, 0, 0, +1);
            return;
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            std::size_t start = pos_;
            while (pos_ < src_.size() &&
                   (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
                ++pos_;
            std::string name = src_.substr(start, pos_ - start);
            if (name == "pi") { emit(Expr::Op::Const, kPi, 0, 0, +1); return; }
            if ((name.size() == 2) && (name[0] == 'x' || name[0] == 'y') &&
                name[1] >= '1' && name[1] <= '3') {
                int idx = name[1] - '1';
                if (name[0] == 'x') { *xm_ |= 1u << idx; emit(Expr::Op::VarX, 0, idx, 0, +1); }
                else { *ym_ |= 1u << idx; emit(Expr::Op::VarY, 0, idx, 0, +1); }
                return;
            }
            if (name == "sin" || name == "cos" || name == "abs") {
                if (!eat('(')) throw ParseError("expected '(' after " + name, pos_);
                parse_expr();
                if (!eat(')')) throw ParseError("expected ')'", pos_);
                emit(name == "sin" ? Expr::Op::Sin : name == "cos" ? Expr::Op::Cos : Expr::Op::Abs);
                return;
            }
            if (name == "pow") {
                if (!eat('(')) throw ParseError("expected '(' after pow", pos_);
                parse_expr();
                if (!eat(',')) throw ParseError("expected ',' in pow", pos_);
                parse_expr();
                if (!eat(')')) throw ParseError("expected ')'", pos_);
                emit(Expr::Op::Pow, 0, 0, int(pos_), -1);
                return;
            }
            throw ParseError("unknown identifier '" + name + "'", start);
        }
        throw ParseError(std::string("unexpected character '") + c + "'", pos_);
    }
};

Expr Expr::parse(const std::string& source) {
    return ExprParser(source).run();
}

double Expr::eval(const double* x, const double* y) const {
    double stack[64];
    int sp = 0;
    for (const Instr& in : code_) {
        switch (in.op) {
        case Op::Const: stack[sp++] = in.value; break;
        case Op::VarX: stack[sp++] = x[in.index]; break;
        case Op::VarY: stack[sp++] = y[in.index]; break;
        case Op::Add: --sp; stack[sp - 1] += stack[sp]; break;
        case Op::Sub: --sp; stack[sp - 1] -= stack[sp]; break;
        case Op::Mul: --sp; stack[sp - 1] *= stack[sp]; break;
        case Op::Div:
            --sp;
            if (stack[sp] == 0.0)
                throw EvalError("division by zero in '" + source_ + "' at position " +
                                std::to_string(in.pos));
            stack[sp - 1] /= stack[sp];
            break;
        case Op::Neg: stack[sp - 1] = -stack[sp - 1]; break;
        case Op::Pow: {
            --sp;
            double b = stack[sp - 1], e = stack[sp];
            // small integer exponents are common (squares, cubes); std::pow
            // is an order of magnitude slower than repeated multiplication
            if (e == 2.0) stack[sp - 1] = b * b;
            else if (e == 3.0) stack[sp - 1] = b * b * b;
            else if (e == 4.0) { double b2 = b * b; stack[sp - 1] = b2 * b2; }
            else stack[sp - 1] = std::pow(b, e);
            break;
        }
        case Op::Sin: stack[sp - 1] = std::sin(stack[sp - 1]); break;
        case Op::Cos: stack[sp - 1] = std::cos(stack[sp - 1]); break;
        case Op::Abs: stack[sp - 1] = std::fabs(stack[sp - 1]); break;
        }
    }
    return stack[0];
}

} // namespace oscihom
