#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "oscihom/errors.hpp"

namespace oscihom {

// Compiled arithmetic expression in the variables x1..x3, y1..y3.
//
// Grammar (shared across curve specs, densities and CLI configs):
//   expr    := term (('+'|'-') term)*
//   term    := factor (('*'|'/') factor)*
//   factor  := ('-'|'+')* power
//   power   := atom ('^' factor)?            // right associative
//   atom    := number | 'pi' | variable | func '(' args ')' | '(' expr ')'
//   func    := sin | cos | abs | pow
//
// Expressions are compiled to a flat postfix program evaluated on a small
// value stack; no allocation happens during eval().
class Expr {
public:
    static Expr parse(const std::string& source);

    // x and y point at 3 doubles each (unused trailing entries may be 0).
    double eval(const double* x, const double* y) const;

    // Bitmask of variables referenced, bit i for x_{i+1} / y_{i+1}.
    unsigned x_mask() const { return x_mask_; }
    unsigned y_mask() const { return y_mask_; }
    const std::string& source() const { return source_; }

private:
    enum class Op : std::uint8_t {
        Const, VarX, VarY, Add, Sub, Mul, Div, Neg, Pow, Sin, Cos, Abs
    };
    struct Instr {
        Op op;
        double value = 0.0; // Const
        int index = 0;      // VarX/VarY: 0..2
        int pos = 0;        // source position, for error messages
    };

    std::vector<Instr> code_;
    unsigned x_mask_ = 0;
    unsigned y_mask_ = 0;
    int max_depth_ = 0;
    std::string source_;

    friend class ExprParser;
};

} // namespace oscihom
