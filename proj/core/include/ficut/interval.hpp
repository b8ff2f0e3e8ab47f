// Copyright (c) ficut contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <string>

#include "ficut/ast.hpp"

namespace ficut {

/// Closed interval endpoints. Soundness of outward rounding rests on a fixed
/// relative slack per operation instead of directed rounding modes; zero
/// endpoints stay exact, which the pruning rules rely on.
struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    bool operator==(const Interval&) const = default;
};

inline constexpr double kOutwardSlack = 1e-12;

Interval outward(Interval x);

Interval iadd(Interval a, Interval b);
Interval isub(Interval a, Interval b);
Interval ineg(Interval a);
Interval imul(Interval a, Interval b);
/// Whole line when b contains zero (pessimistic, never an error).
Interval idiv(Interval a, Interval b);
/// Tight power rule (even exponents do not go negative).
Interval ipow(Interval a, int n);
/// Clamped to the function's range; [0, +inf] when the radicand can only be
/// negative, so pruning stays sound on invalid boxes.
Interval isqrt(Interval a);

Interval hull(Interval a, Interval b);
bool intersects(Interval a, Interval b);
double width(Interval a);
double midpoint(Interval a);
bool contains(Interval a, double v);

/// Axis-aligned box over named variables.
using Box = std::map<std::string, Interval>;

/// Max axis width.
double box_width(const Box& b);
Box box_midpoint(const Box& b);

/// Natural interval extension: encloses eval_term over every point of the
/// box (inclusion isotonicity). Throws EvalError only for variables missing
/// from the box.
Interval interval_eval(const Term& t, const Box& box);

} // namespace ficut
