#ifndef WQED_DISTAMP_HPP
#define WQED_DISTAMP_HPP

#include <optional>
#include <string>
#include <vector>

#include "wqed/linear_form.hpp"

namespace wqed {

/// Relative scale (vs Gamma) below which a denominator counts as on-pole,
/// a delta constant as zero, and structure constants as equal.
inline constexpr double kEpsPole = 1e-9;

/// Dirac delta of a linear form. The argument must be real and not
/// identically zero (a zero argument is a divergent delta(0)).
struct DeltaFactor {
    LinearForm arg;
    explicit DeltaFactor(LinearForm a);
};

/// g(arg)^power with g(x) = pi*delta(x) + i/x, the half-line time-integral
/// kernel. Argument real, power >= 1.
struct GFactor {
    LinearForm arg;
    int power = 1;
    GFactor(LinearForm a, int p = 1);
};

/// form^power smooth rational factor; power < 0 is a denominator 1/form^|power|
/// (the pole-generating case), power > 0 a polynomial numerator factor.
struct PoleFactor {
    LinearForm form;
    int power = -1;
    PoleFactor(LinearForm f, int p = -1);
};

/// One product contribution: prefactor * prod delta * prod g * prod poles.
/// `final_ground` tags the emitter's final state for Lambda amplitudes
/// (0 = not applicable / TLS); terms in different sectors never merge.
struct Term {
    complexd prefactor{1.0, 0.0};
    std::vector<LinearForm> deltas;
    std::vector<GFactor> gfactors;
    std::vector<PoleFactor> polefactors;
    int final_ground = 0;
    std::string origin;

    Term& with_delta(LinearForm l);
    Term& with_g(LinearForm l, int p = 1);
    Term& with_pole(LinearForm l, int p = -1);
};

enum class SymbolRole { Input, Output, Unused };

/// A finite sum of Terms with a common frequency scale (Gamma) used for
/// nondimensionalization and tolerances, plus the numeric drive bound at
/// construction (used as default values at evaluation).
struct Amplitude {
    std::vector<Term> terms;
    double scale = 1.0;
    int photons = 1;
    Assignment bound;
    bool canonical = false;

    SymbolRole role(Symbol s) const;
    std::size_t term_count() const { return terms.size(); }
};

/// Expand every g factor of `term` via g(L) = pi*delta(L) + i/L. Only first
/// powers have a well-defined expansion; higher powers would produce squared
/// deltas and throw IllDefinedDistribution. Pure; `term` may carry deltas
/// and pole factors which are copied into each branch.
std::vector<Term> expand_g(const Term& term);

struct IllDefinedDistribution : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct PinchSingularity : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct OnPoleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ConstraintViolated : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Reduce a term's delta system to its unique reduced-row-echelon
/// representation (folding Jacobian scales into the prefactor) and
/// substitute each delta's leading variable into every other factor,
/// so smooth factors are written on the support of the term's own deltas.
/// Does not expand g factors. Returns nullopt when the term vanishes
/// (a delta argument reduced to a nonzero constant).
std::optional<Term> reduce_on_support(const Term& term, double scale);

/// Full canonical form: g's expanded, every term reduced on its own
/// support, identical product terms merged, deterministic ordering.
/// Idempotent.
Amplitude canonicalize(const Amplitude& amp);

/// Terms grouped by identical delta structure (and final ground state);
/// the coefficient attached to a structure is the sum over its terms.
struct StructureGroup {
    std::vector<LinearForm> deltas;
    int final_ground = 0;
    std::vector<std::size_t> term_indices;
};
std::vector<StructureGroup> structures(const Amplitude& amp);

/// Smooth coefficient attached to `deltaset` evaluated at `assignment`
/// (merged onto the amplitude's bound values). The assignment must satisfy
/// every delta of the set; pole factors must be off-pole. g factors, when
/// present (non-canonical amplitudes), are evaluated off-shell as i/L and
/// the assignment must keep their arguments away from zero.
complexd eval_coefficient(const Amplitude& amp, const std::vector<LinearForm>& deltaset,
                          const Assignment& assignment,
                          std::optional<int> final_ground = std::nullopt);

/// As eval_coefficient but returns nullopt when the structure is absent.
std::optional<complexd> try_eval_coefficient(const Amplitude& amp,
                                             const std::vector<LinearForm>& deltaset,
                                             const Assignment& assignment,
                                             std::optional<int> final_ground = std::nullopt);

/// Sum of the coefficients of every structure the assignment satisfies
/// (degenerate drives make permutation structures coincide; their
/// coefficients add, matching the multiset-merge semantics).
complexd coefficient_total(const Amplitude& amp, const Assignment& assignment,
                           std::optional<int> final_ground = std::nullopt);

struct GridEqualityReport {
    bool pass = false;
    bool structures_match = false;
    double max_rel_dev = 0.0;
    double max_condition = 1.0;  // worst sum-cancellation ratio seen
    std::string detail;
};

/// Structure-set equality plus coefficient agreement on a grid. Each grid
/// assignment provides free-variable values; the leading variables of each
/// structure are solved from its deltas before evaluation. Points within
/// the pole guard of any factor of either amplitude are skipped.
GridEqualityReport equal_on_grid(const Amplitude& a, const Amplitude& b,
                                 const std::vector<Assignment>& grid, double tol);

/// Deterministic uniform grid in [center-halfwidth, center+halfwidth] for
/// the given symbols. Plain splitmix64 stream; identical across platforms.
std::vector<Assignment> make_grid(std::uint64_t seed, std::size_t n,
                                  const std::vector<Symbol>& symbols, double center,
                                  double halfwidth);

std::string structure_str(const std::vector<LinearForm>& deltas);

}  // namespace wqed

#endif
