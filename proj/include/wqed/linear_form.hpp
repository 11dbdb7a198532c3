#ifndef WQED_LINEAR_FORM_HPP
#define WQED_LINEAR_FORM_HPP

#include <array>
#include <complex>
#include <cstdint>
#include <optional>
#include <string>

namespace wqed {

using complexd = std::complex<double>;

/// Frequency variables of the amplitude algebra. Enum order doubles as the
/// delta-elimination priority: outputs before inputs, lower index first.
enum class Symbol : int { F0 = 0, F1 = 1, F = 2, I0 = 3, I1 = 4, I = 5 };
inline constexpr int kNumSymbols = 6;

const char* symbol_name(Symbol s);

/// Exact rational with int64 numerator/denominator, always gcd-reduced
/// with positive denominator. The coefficients occurring here stay tiny
/// (delta arguments and detunings are +-1 combinations), so no overflow
/// guard beyond the gcd reduction is needed.
struct Rational {
    std::int64_t num = 0;
    std::int64_t den = 1;

    Rational() = default;
    Rational(std::int64_t n) : num(n), den(1) {}
    Rational(std::int64_t n, std::int64_t d);

    bool is_zero() const { return num == 0; }
    double value() const { return static_cast<double>(num) / static_cast<double>(den); }

    Rational operator-() const { return {-num, den}; }
    Rational operator+(const Rational& o) const;
    Rational operator-(const Rational& o) const;
    Rational operator*(const Rational& o) const;
    Rational operator/(const Rational& o) const;
    bool operator==(const Rational& o) const { return num == o.num && den == o.den; }
};

/// Assignment of numeric frequencies to symbols used at evaluation time.
struct Assignment {
    std::array<std::optional<double>, kNumSymbols> values{};

    void set(Symbol s, double v) { values[static_cast<int>(s)] = v; }
    std::optional<double> get(Symbol s) const { return values[static_cast<int>(s)]; }
    /// This assignment with holes filled from `fallback`.
    Assignment merged_onto(const Assignment& fallback) const;
};

/// sum_k c_k * symbol_k + constant, with exact rational c_k and a complex
/// constant (delta and g arguments keep it real; pole factors such as
/// Delta + i*pi*gamma^2 use the imaginary part).
class LinearForm {
  public:
    LinearForm() = default;
    explicit LinearForm(complexd constant) : constant_(constant) {}

    static LinearForm variable(Symbol s);

    const Rational& coeff(Symbol s) const { return coeffs_[static_cast<int>(s)]; }
    void set_coeff(Symbol s, Rational c) { coeffs_[static_cast<int>(s)] = c; }
    complexd constant() const { return constant_; }
    void set_constant(complexd c) { constant_ = c; }

    bool is_constant() const;
    bool has_symbol(Symbol s) const { return !coeff(s).is_zero(); }
    /// First symbol (in priority order) with nonzero coefficient.
    std::optional<Symbol> leading_symbol() const;

    LinearForm operator+(const LinearForm& o) const;
    LinearForm operator-(const LinearForm& o) const;
    LinearForm operator-() const;
    LinearForm scaled(const Rational& r) const;
    LinearForm plus_const(complexd c) const;

    /// Replace `s` by `repl` (which must not contain `s`).
    LinearForm substituted(Symbol s, const LinearForm& repl) const;

    /// Solve this == 0 for `s`; requires a nonzero coefficient on `s`.
    LinearForm solved_for(Symbol s) const;

    complexd evaluate(const Assignment& a) const;

    /// Scale factor r such that (*this) == r * normal_form(), where the
    /// normal form has integer, gcd-1 coefficients with positive leading
    /// coefficient. Pure-constant forms normalize to themselves (scale 1).
    struct Normalized;
    Normalized normalized() const;

    /// Exact equality of the symbolic part; constants compared to `const_tol`.
    bool same_symbolic_part(const LinearForm& o) const;
    bool approx_equal(const LinearForm& o, double const_tol) const;

    /// Canonical printable form, e.g. "f0+f1-i0-i1" or "f0-2e+15+1.2566e+09i".
    std::string str() const;

    /// Deterministic ordering key (symbolic part exact, constants by value).
    int compare(const LinearForm& o) const;

  private:
    std::array<Rational, kNumSymbols> coeffs_{};
    complexd constant_{0.0, 0.0};
};

struct LinearForm::Normalized {
    LinearForm form;
    Rational scale;
};

}  // namespace wqed

#endif
