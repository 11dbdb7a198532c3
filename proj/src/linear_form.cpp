#include "wqed/linear_form.hpp"

#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace wqed {

const char* symbol_name(Symbol s) {
    switch (s) {
        case Symbol::F0: return "f0";
        case Symbol::F1: return "f1";
        case Symbol::F: return "f";
        case Symbol::I0: return "i0";
        case Symbol::I1: return "i1";
        case Symbol::I: return "i";
    }
    return "?";
}

Rational::Rational(std::int64_t n, std::int64_t d) {
    if (d == 0) throw std::invalid_argument("rational with zero denominator");
    if (d < 0) { n = -n; d = -d; }
    std::int64_t g = std::gcd(n < 0 ? -n : n, d);
    if (g > 1) { n /= g; d /= g; }
    num = n;
    den = d;
}

Rational Rational::operator+(const Rational& o) const { return {num * o.den + o.num * den, den * o.den}; }
Rational Rational::operator-(const Rational& o) const { return {num * o.den - o.num * den, den * o.den}; }
Rational Rational::operator*(const Rational& o) const { return {num * o.num, den * o.den}; }
Rational Rational::operator/(const Rational& o) const {
    if (o.num == 0) throw std::invalid_argument("rational division by zero");
    return {num * o.den, den * o.num};
}

Assignment Assignment::merged_onto(const Assignment& fallback) const {
    Assignment out = fallback;
    for (int k = 0; k < kNumSymbols; ++k)
        if (values[k]) out.values[k] = values[k];
    return out;
}

LinearForm LinearForm::variable(Symbol s) {
    LinearForm f;
    f.set_coeff(s, Rational(1));
    return f;
}

bool LinearForm::is_constant() const {
    for (const auto& c : coeffs_)
        if (!c.is_zero()) return false;
    return true;
}

std::optional<Symbol> LinearForm::leading_symbol() const {
    for (int k = 0; k < kNumSymbols; ++k)
        if (!coeffs_[k].is_zero()) return static_cast<Symbol>(k);
    return std::nullopt;
}

LinearForm LinearForm::operator+(const LinearForm& o) const {
    LinearForm out = *this;
    for (int k = 0; k < kNumSymbols; ++k) out.coeffs_[k] = out.coeffs_[k] + o.coeffs_[k];
    out.constant_ += o.constant_;
    return out;
}

LinearForm LinearForm::operator-(const LinearForm& o) const {
    LinearForm out = *this;
    for (int k = 0; k < kNumSymbols; ++k) out.coeffs_[k] = out.coeffs_[k] - o.coeffs_[k];
    out.constant_ -= o.constant_;
    return out;
}

LinearForm LinearForm::operator-() const { return scaled(Rational(-1)); }

LinearForm LinearForm::scaled(const Rational& r) const {
    LinearForm out = *this;
    for (auto& c : out.coeffs_) c = c * r;
    out.constant_ *= r.value();
    return out;
}

LinearForm LinearForm::plus_const(complexd c) const {
    LinearForm out = *this;
    out.constant_ += c;
    return out;
}

LinearForm LinearForm::substituted(Symbol s, const LinearForm& repl) const {
    const Rational c = coeff(s);
    if (c.is_zero()) return *this;
    LinearForm out = *this;
    out.set_coeff(s, Rational(0));
    return out + repl.scaled(c);
}

LinearForm LinearForm::solved_for(Symbol s) const {
    const Rational c = coeff(s);
    if (c.is_zero()) throw std::invalid_argument("solved_for: symbol absent");
    LinearForm rest = *this;
    rest.set_coeff(s, Rational(0));
    return rest.scaled(Rational(-1) / c);
}

complexd LinearForm::evaluate(const Assignment& a) const {
    complexd v = constant_;
    for (int k = 0; k < kNumSymbols; ++k) {
        if (coeffs_[k].is_zero()) continue;
        auto x = a.values[k];
        if (!x) throw std::invalid_argument(std::string("evaluate: no value bound for ") +
                                            symbol_name(static_cast<Symbol>(k)));
        v += coeffs_[k].value() * (*x);
    }
    return v;
}

LinearForm::Normalized LinearForm::normalized() const {
    auto lead = leading_symbol();
    if (!lead) return {*this, Rational(1)};
    // common denominator, then gcd of numerators, sign from the leading coeff
    std::int64_t den_lcm = 1;
    for (const auto& c : coeffs_)
        if (!c.is_zero()) den_lcm = std::lcm(den_lcm, c.den);
    std::int64_t num_gcd = 0;
    for (const auto& c : coeffs_)
        if (!c.is_zero()) num_gcd = std::gcd(num_gcd, std::llabs(c.num * (den_lcm / c.den)));
    Rational scale(num_gcd, den_lcm);  // *this = scale * integer_form
    if (coeff(*lead).num < 0) scale = -scale;
    Normalized out;
    out.scale = scale;
    out.form = scaled(Rational(1) / scale);
    return out;
}

bool LinearForm::same_symbolic_part(const LinearForm& o) const {
    for (int k = 0; k < kNumSymbols; ++k)
        if (!(coeffs_[k] == o.coeffs_[k])) return false;
    return true;
}

bool LinearForm::approx_equal(const LinearForm& o, double const_tol) const {
    return same_symbolic_part(o) && std::abs(constant_ - o.constant_) <= const_tol;
}

namespace {
std::string num_str(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}
}  // namespace

std::string LinearForm::str() const {
    std::ostringstream os;
    bool first = true;
    for (int k = 0; k < kNumSymbols; ++k) {
        const Rational& c = coeffs_[k];
        if (c.is_zero()) continue;
        const char* name = symbol_name(static_cast<Symbol>(k));
        if (c.num > 0 && !first) os << "+";
        if (c.num == -1 && c.den == 1) os << "-";
        else if (!(c.num == 1 && c.den == 1)) {
            os << c.num;
            if (c.den != 1) os << "/" << c.den;
            os << "*";
        }
        os << name;
        first = false;
    }
    const double re = constant_.real(), im = constant_.imag();
    if (re != 0.0 || first) {
        if (re >= 0.0 && !first) os << "+";
        os << num_str(re);
        first = false;
    }
    if (im != 0.0) {
        if (im >= 0.0) os << "+";
        os << num_str(im) << "i";
    }
    return os.str();
}

int LinearForm::compare(const LinearForm& o) const {
    for (int k = 0; k < kNumSymbols; ++k) {
        const double a = coeffs_[k].value(), b = o.coeffs_[k].value();
        if (a < b) return -1;
        if (a > b) return 1;
    }
    if (constant_.real() < o.constant_.real()) return -1;
    if (constant_.real() > o.constant_.real()) return 1;
    if (constant_.imag() < o.constant_.imag()) return -1;
    if (constant_.imag() > o.constant_.imag()) return 1;
    return 0;
}

}  // namespace wqed
