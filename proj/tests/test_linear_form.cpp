#include <doctest.h>

#include "wqed/linear_form.hpp"

using namespace wqed;

namespace {
LinearForm var(Symbol s) { return LinearForm::variable(s); }
}

TEST_CASE("rational arithmetic stays reduced") {
    Rational a(2, 4);
    CHECK(a.num == 1);
    CHECK(a.den == 2);
    CHECK((a + Rational(1, 2)) == Rational(1));
    CHECK((Rational(1, 3) * Rational(3, 7)) == Rational(1, 7));
    CHECK((Rational(1) / Rational(-2)) == Rational(-1, 2));
    CHECK_THROWS(Rational(1, 0));
}

TEST_CASE("normalization: leading coefficient positive, gcd one") {
    // -2 f0 - 2 f1 + 4 i0 -> f0 + f1 - 2 i0, scale -2
    LinearForm l = var(Symbol::F0).scaled(Rational(-2)) + var(Symbol::F1).scaled(Rational(-2)) +
                   var(Symbol::I0).scaled(Rational(4));
    auto n = l.normalized();
    CHECK(n.scale == Rational(-2));
    CHECK(n.form.coeff(Symbol::F0) == Rational(1));
    CHECK(n.form.coeff(Symbol::F1) == Rational(1));
    CHECK(n.form.coeff(Symbol::I0) == Rational(-2));
}

TEST_CASE("structural equality after normalization") {
    LinearForm a = (var(Symbol::F) - var(Symbol::I)).scaled(Rational(3, 2));
    LinearForm b = (var(Symbol::F) - var(Symbol::I)).scaled(Rational(-5));
    CHECK(a.normalized().form.compare(b.normalized().form) == 0);
}

TEST_CASE("substitution and solving") {
    // f0 + f1 - i0 - i1 solved for f0
    LinearForm cons = var(Symbol::F0) + var(Symbol::F1) - var(Symbol::I0) - var(Symbol::I1);
    LinearForm f0 = cons.solved_for(Symbol::F0);
    CHECK(f0.coeff(Symbol::F1) == Rational(-1));
    CHECK(f0.coeff(Symbol::I0) == Rational(1));
    LinearForm g = var(Symbol::F0) - var(Symbol::I0);  // becomes i1 - f1 after substitution
    LinearForm sub = g.substituted(Symbol::F0, f0);
    CHECK(sub.coeff(Symbol::F1) == Rational(-1));
    CHECK(sub.coeff(Symbol::I1) == Rational(1));
    CHECK(sub.coeff(Symbol::I0) == Rational(0));
}

TEST_CASE("evaluation requires bound symbols") {
    LinearForm l = var(Symbol::F) - var(Symbol::I);
    Assignment a;
    a.set(Symbol::F, 3.0);
    CHECK_THROWS_AS((void)l.evaluate(a), std::invalid_argument);
    a.set(Symbol::I, 1.0);
    CHECK(l.evaluate(a) == complexd{2.0, 0.0});
}

TEST_CASE("printing canonical strings") {
    LinearForm cons = var(Symbol::F0) + var(Symbol::F1) - var(Symbol::I0) - var(Symbol::I1);
    CHECK(cons.str() == "f0+f1-i0-i1");
    LinearForm shifted = (var(Symbol::F) - var(Symbol::I)).plus_const(complexd{2e14, 0.0});
    CHECK(shifted.str() == "f-i+2e+14");
}
