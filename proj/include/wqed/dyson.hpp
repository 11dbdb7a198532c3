#ifndef WQED_DYSON_HPP
#define WQED_DYSON_HPP

#include <optional>

#include "wqed/distamp.hpp"
#include "wqed/model.hpp"

namespace wqed {

/// One Dyson-series contribution at order n (n interaction-Hamiltonian
/// insertions, n/2 absorption-emission pairs). Loops are virtual photons
/// emitted and immediately reabsorbed; non-adjacent internal emissions
/// integrate to zero and are never generated.
struct Diagram {
    int order = 2;        // Dyson order n, even
    int photons = 1;      // p
    bool mixing = false;  // p=2 only: both photons interact
    int s = 0;            // which input is absorbed first (p=2)
    int sp = 0;           // which output is emitted first (p=2)
    int loops_first = 0;  // loops following the first absorption
    int loops_second = 0; // loops following the second absorption (mixing)
    int intermediate = 0; // Lambda mixing: ground level between the photons

    /// Interaction pairs assigned to the first photon's segment.
    int split_m() const { return mixing ? 1 + loops_first : order / 2; }
};

std::vector<Diagram> enumerate_diagrams(int n, int p, EmitterKind kind);

/// Term for one diagram per the event rules: each real absorption or
/// non-final emission contributes g(running detuning), each loop an extra
/// pi*g at the previous absorption's argument, the final emission the
/// energy-conservation delta (2*pi), a passing photon its own delta.
/// nu/mu are the initial/final ground levels (ignored for the TLS).
Term diagram_amplitude(const Diagram& d, const EmitterSystem& sys, int nu = 1, int mu = 1);

/// Same term with the per-loop sum over intermediate levels enumerated
/// explicitly instead of folded into (gamma1^2+gamma2^2)^loops; for
/// validating the folding at small n.
std::vector<Term> diagram_amplitude_unfolded(const Diagram& d, const EmitterSystem& sys,
                                             int nu = 1, int mu = 1);

struct OrderTerm {
    int order = 0;
    Amplitude amplitude;
};

/// Sum of all diagrams at order n. Order 0 is the free propagation
/// (identity) amplitude. For Lambda systems both final-ground sectors are
/// produced, tagged on the terms.
OrderTerm order_term(int n, int p, const EmitterSystem& sys, int nu = 1);

struct PartialSumReport {
    std::vector<int> orders;
    std::vector<complexd> partials;  // running sums including order 0
    complexd value{0.0, 0.0};
    double ratio = 0.0;       // |pi gamma^2 g| at the evaluation point
    bool divergent = false;   // ratio >= 1: use Borel summation instead
    bool converged = false;   // relative step < 1e-12
    int converged_at = -1;
};

/// Partial sums of the coefficient attached to `deltaset` at `point`
/// (off-shell: no delta argument other than the selected set may vanish;
/// g factors evaluate as i/L). N_max counts Dyson orders.
PartialSumReport partial_sum(int n_max, int p, const EmitterSystem& sys, const Assignment& point,
                             const std::vector<LinearForm>& deltaset, int nu = 1,
                             std::optional<int> mu = std::nullopt);

/// Wick pairing census for the two-photon vacuum expectation value at
/// order n: total pairings and how many survive the adjacency rule.
struct ContractionCensus {
    int raw = 0;
    int surviving = 0;
    int non_mixing = 0;
    std::vector<int> mixing_split_counts;  // per loop split (k1 = index)
};
ContractionCensus count_contractions(int n);

struct A8SpeciesResult {
    std::string name;
    bool structural_pass = false;
    double max_rel_dev = 0.0;
};

struct A8Report {
    int raw_contractions = 0;
    int surviving_terms = 0;
    int species_count = 0;
    std::vector<A8SpeciesResult> species;
    bool pass = false;
};

/// Order-8 fixture: checks the enumerator against the hard-coded
/// transcription of the explicit n=8 result, species by species, plus the
/// 32 -> 16 contraction census.
A8Report a8_fixture_check(std::uint64_t seed = 8);

/// Debug dump: {n, p, s, s', m, loops: [...], flags}.
std::string diagram_json(const Diagram& d);
std::string diagrams_json(const std::vector<Diagram>& ds);

}  // namespace wqed

#endif
