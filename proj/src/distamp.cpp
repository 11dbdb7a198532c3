#include "wqed/distamp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace wqed {

namespace {

complexd ipow(complexd z, int p) {
    complexd out{1.0, 0.0};
    const complexd base = p >= 0 ? z : complexd{1.0, 0.0} / z;
    for (int k = 0; k < std::abs(p); ++k) out *= base;
    return out;
}

double rpow(double x, int p) {
    double out = 1.0;
    const double base = p >= 0 ? x : 1.0 / x;
    for (int k = 0; k < std::abs(p); ++k) out *= base;
    return out;
}

bool real_arg(const LinearForm& l) { return l.constant().imag() == 0.0; }

}  // namespace

DeltaFactor::DeltaFactor(LinearForm a) : arg(std::move(a)) {
    if (!real_arg(arg)) throw std::invalid_argument("delta argument must be real");
    if (arg.is_constant() && arg.constant() == complexd{0.0, 0.0})
        throw IllDefinedDistribution("delta of identically zero argument");
}

GFactor::GFactor(LinearForm a, int p) : arg(std::move(a)), power(p) {
    if (!real_arg(arg)) throw std::invalid_argument("g argument must be real");
    if (power < 1) throw std::invalid_argument("g power must be >= 1");
}

PoleFactor::PoleFactor(LinearForm f, int p) : form(std::move(f)), power(p) {
    if (power == 0) throw std::invalid_argument("pole factor power must be nonzero");
}

Term& Term::with_delta(LinearForm l) {
    deltas.push_back(DeltaFactor(std::move(l)).arg);
    return *this;
}
Term& Term::with_g(LinearForm l, int p) {
    gfactors.push_back(GFactor(std::move(l), p));
    return *this;
}
Term& Term::with_pole(LinearForm l, int p) {
    polefactors.push_back(PoleFactor(std::move(l), p));
    return *this;
}

SymbolRole Amplitude::role(Symbol s) const {
    if (photons == 1) {
        if (s == Symbol::F) return SymbolRole::Output;
        if (s == Symbol::I) return SymbolRole::Input;
        return SymbolRole::Unused;
    }
    if (s == Symbol::F0 || s == Symbol::F1) return SymbolRole::Output;
    if (s == Symbol::I0 || s == Symbol::I1) return SymbolRole::Input;
    return SymbolRole::Unused;
}

std::vector<Term> expand_g(const Term& term) {
    std::vector<Term> out;
    out.push_back(term);
    out.front().gfactors.clear();
    for (const GFactor& g : term.gfactors) {
        if (g.power >= 2)
            throw IllDefinedDistribution(
                "ill-defined distribution: expanding g(L)^" + std::to_string(g.power) +
                " produces a squared delta; evaluate such terms off-shell instead");
        std::vector<Term> next;
        next.reserve(out.size() * 2);
        for (const Term& t : out) {
            Term d = t;  // pi * delta(L)
            d.prefactor *= std::numbers::pi;
            d.deltas.push_back(g.arg);
            next.push_back(std::move(d));
            Term p = t;  // i / L
            p.prefactor *= complexd{0.0, 1.0};
            p.polefactors.emplace_back(g.arg, -1);
            next.push_back(std::move(p));
        }
        out = std::move(next);
    }
    return out;
}

namespace {

// Unique RREF of the delta system; folds the Jacobian of the rewriting and
// of argument normalization into the prefactor. Returns false if the term
// vanished (delta of a nonzero constant).
bool rref_deltas(Term& t, double const_tol) {
    auto& rows = t.deltas;
    for (const auto& row : rows) {
        if (!row.is_constant()) continue;
        if (std::abs(row.constant()) <= const_tol)
            throw IllDefinedDistribution("delta of identically zero argument (squared delta)");
        return false;  // delta(nonzero const) == 0
    }
    std::size_t r = 0;
    for (int col = 0; col < kNumSymbols && r < rows.size(); ++col) {
        const Symbol s = static_cast<Symbol>(col);
        std::size_t pivot = r;
        while (pivot < rows.size() && rows[pivot].coeff(s).is_zero()) ++pivot;
        if (pivot == rows.size()) continue;
        std::swap(rows[r], rows[pivot]);
        const Rational lead = rows[r].coeff(s);
        if (!(lead == Rational(1))) {
            rows[r] = rows[r].scaled(Rational(1) / lead);
            t.prefactor *= std::abs(lead.value());  // delta(a x)=delta(x)/|a|
        }
        for (std::size_t j = 0; j < rows.size(); ++j) {
            if (j == r) continue;
            const Rational c = rows[j].coeff(s);
            if (c.is_zero()) continue;
            rows[j] = rows[j] - rows[r].scaled(c);  // unimodular, Jacobian 1
        }
        ++r;
    }
    // rows beyond r are now constants: zero -> squared delta, nonzero -> term dies
    for (std::size_t j = r; j < rows.size(); ++j) {
        if (std::abs(rows[j].constant()) <= const_tol)
            throw IllDefinedDistribution("delta of identically zero argument (squared delta)");
        return false;
    }
    // integer gcd-1 normal form per row
    for (auto& row : rows) {
        auto nrm = row.normalized();
        if (!(nrm.scale == Rational(1))) {
            t.prefactor /= std::abs(nrm.scale.value());
            row = nrm.form;
        }
    }
    std::sort(rows.begin(), rows.end(),
              [](const LinearForm& a, const LinearForm& b) { return a.compare(b) < 0; });
    return true;
}

// Substitute each delta row's leading variable into the smooth factors and
// fold factors that became constant. Returns false if the term vanished.
bool substitute_support(Term& t, double const_tol) {
    for (const LinearForm& row : t.deltas) {
        const auto lead = row.leading_symbol();
        if (!lead) continue;
        const LinearForm repl = row.solved_for(*lead);
        for (auto& g : t.gfactors) g.arg = g.arg.substituted(*lead, repl);
        for (auto& p : t.polefactors) p.form = p.form.substituted(*lead, repl);
    }
    // fold constant pole factors; detect pinches
    std::vector<PoleFactor> keep;
    for (const auto& p : t.polefactors) {
        if (!p.form.is_constant()) {
            keep.push_back(p);
            continue;
        }
        const complexd c = p.form.constant();
        if (std::abs(c) <= const_tol) {
            if (p.power < 0)
                throw PinchSingularity("pinch singularity: denominator " + p.form.str() +
                                       " vanishes on the delta support");
            return false;  // zero numerator factor
        }
        t.prefactor *= ipow(c, p.power);
    }
    t.polefactors = std::move(keep);
    // constant g arguments: g(c) off-shell is i/c; exactly zero is ill-defined
    std::vector<GFactor> gkeep;
    for (const auto& g : t.gfactors) {
        if (!g.arg.is_constant()) {
            gkeep.push_back(g);
            continue;
        }
        const complexd c = g.arg.constant();
        if (std::abs(c) <= const_tol)
            throw IllDefinedDistribution("g factor pinned to zero argument on the delta support");
        t.prefactor *= ipow(complexd{0.0, 1.0} / c, g.power);
    }
    t.gfactors = std::move(gkeep);
    return true;
}

// fold duplicated smooth factors and normalize their forms
void normalize_smooth(Term& t) {
    for (auto& g : t.gfactors) {
        auto nrm = g.arg.normalized();
        const double s = nrm.scale.value();
        if (s > 0.0 && !(nrm.scale == Rational(1))) {
            // g(a x) = g(x)/a only for a > 0 (the principal part is odd)
            t.prefactor *= rpow(s, -g.power);
            g.arg = nrm.form;
        } else if (s < 0.0 && !(nrm.scale == Rational(-1))) {
            // keep orientation, strip magnitude
            const double mag = -s;
            t.prefactor *= rpow(mag, -g.power);
            g.arg = nrm.form.scaled(Rational(-1));
        }
    }
    for (auto& p : t.polefactors) {
        auto nrm = p.form.normalized();
        if (!(nrm.scale == Rational(1))) {
            t.prefactor *= ipow(complexd{nrm.scale.value(), 0.0}, p.power);
            p.form = nrm.form;
        }
    }
    auto lf_less = [](const LinearForm& a, const LinearForm& b) { return a.compare(b) < 0; };
    std::sort(t.gfactors.begin(), t.gfactors.end(),
              [&](const GFactor& a, const GFactor& b) { return lf_less(a.arg, b.arg); });
    std::sort(t.polefactors.begin(), t.polefactors.end(),
              [&](const PoleFactor& a, const PoleFactor& b) { return lf_less(a.form, b.form); });
    // merge equal adjacent factors
    std::vector<GFactor> gs;
    for (const auto& g : t.gfactors) {
        if (!gs.empty() && gs.back().arg.compare(g.arg) == 0) gs.back().power += g.power;
        else gs.push_back(g);
    }
    t.gfactors = std::move(gs);
    std::vector<PoleFactor> ps;
    for (const auto& p : t.polefactors) {
        if (!ps.empty() && ps.back().form.compare(p.form) == 0) ps.back().power += p.power;
        else ps.push_back(p);
    }
    std::erase_if(ps, [](const PoleFactor& p) { return p.power == 0; });
    t.polefactors = std::move(ps);
}

int term_structure_compare(const Term& a, const Term& b) {
    if (a.final_ground != b.final_ground) return a.final_ground < b.final_ground ? -1 : 1;
    if (a.deltas.size() != b.deltas.size()) return a.deltas.size() < b.deltas.size() ? -1 : 1;
    for (std::size_t k = 0; k < a.deltas.size(); ++k) {
        const int c = a.deltas[k].compare(b.deltas[k]);
        if (c != 0) return c;
    }
    return 0;
}

int term_full_compare(const Term& a, const Term& b) {
    const int c = term_structure_compare(a, b);
    if (c != 0) return c;
    if (a.polefactors.size() != b.polefactors.size())
        return a.polefactors.size() < b.polefactors.size() ? -1 : 1;
    for (std::size_t k = 0; k < a.polefactors.size(); ++k) {
        const int pc = a.polefactors[k].form.compare(b.polefactors[k].form);
        if (pc != 0) return pc;
        if (a.polefactors[k].power != b.polefactors[k].power)
            return a.polefactors[k].power < b.polefactors[k].power ? -1 : 1;
    }
    if (a.gfactors.size() != b.gfactors.size()) return a.gfactors.size() < b.gfactors.size() ? -1 : 1;
    for (std::size_t k = 0; k < a.gfactors.size(); ++k) {
        const int gc = a.gfactors[k].arg.compare(b.gfactors[k].arg);
        if (gc != 0) return gc;
        if (a.gfactors[k].power != b.gfactors[k].power)
            return a.gfactors[k].power < b.gfactors[k].power ? -1 : 1;
    }
    return 0;
}

bool structure_equal(const std::vector<LinearForm>& a, const std::vector<LinearForm>& b,
                     double const_tol) {
    if (a.size() != b.size()) return false;
    for (std::size_t k = 0; k < a.size(); ++k)
        if (!a[k].approx_equal(b[k], const_tol)) return false;
    return true;
}

}  // namespace

std::optional<Term> reduce_on_support(const Term& term, double scale) {
    const double const_tol = kEpsPole * scale;
    Term t = term;
    if (!rref_deltas(t, const_tol)) return std::nullopt;
    if (!substitute_support(t, const_tol)) return std::nullopt;
    normalize_smooth(t);
    return t;
}

Amplitude canonicalize(const Amplitude& amp) {
    Amplitude out;
    out.scale = amp.scale;
    out.photons = amp.photons;
    out.bound = amp.bound;
    out.canonical = true;
    for (const Term& raw : amp.terms) {
        for (const Term& expanded : expand_g(raw)) {
            auto t = reduce_on_support(expanded, amp.scale);
            if (t) out.terms.push_back(std::move(*t));
        }
    }
    std::sort(out.terms.begin(), out.terms.end(),
              [](const Term& a, const Term& b) { return term_full_compare(a, b) < 0; });
    // merge identical product terms
    std::vector<Term> merged;
    std::vector<double> mags;  // running sum of |prefactor| per merged slot
    for (const Term& t : out.terms) {
        if (!merged.empty() && term_full_compare(merged.back(), t) == 0) {
            merged.back().prefactor += t.prefactor;
            mags.back() += std::abs(t.prefactor);
            if (!merged.back().origin.empty() && !t.origin.empty())
                merged.back().origin += "+" + t.origin;
        } else {
            merged.push_back(t);
            mags.push_back(std::abs(t.prefactor));
        }
    }
    std::vector<Term> kept;
    for (std::size_t k = 0; k < merged.size(); ++k)
        if (std::abs(merged[k].prefactor) > 1e-12 * mags[k] && std::abs(merged[k].prefactor) > 0.0)
            kept.push_back(std::move(merged[k]));
    out.terms = std::move(kept);
    return out;
}

std::vector<StructureGroup> structures(const Amplitude& amp) {
    const double const_tol = kEpsPole * amp.scale;
    std::vector<StructureGroup> groups;
    for (std::size_t k = 0; k < amp.terms.size(); ++k) {
        const Term& t = amp.terms[k];
        bool placed = false;
        for (auto& g : groups) {
            if (g.final_ground == t.final_ground && structure_equal(g.deltas, t.deltas, const_tol)) {
                g.term_indices.push_back(k);
                placed = true;
                break;
            }
        }
        if (!placed) groups.push_back({t.deltas, t.final_ground, {k}});
    }
    return groups;
}

namespace {

complexd eval_term_smooth(const Term& t, const Assignment& a, double scale) {
    complexd result = t.prefactor;
    int gamma_power = 0;
    for (const auto& p : t.polefactors) {
        const complexd x = p.form.evaluate(a) / scale;
        if (p.power < 0 && std::abs(x) < kEpsPole)
            throw OnPoleError("on pole: " + p.form.str() + " vanishes at the assignment");
        result *= ipow(x, p.power);
        gamma_power += p.power;
    }
    for (const auto& g : t.gfactors) {
        const complexd x = g.arg.evaluate(a) / scale;
        if (std::abs(x) < kEpsPole)
            throw OnPoleError("g argument " + g.arg.str() + " vanishes at the assignment (on shell)");
        result *= ipow(complexd{0.0, 1.0} / x, g.power);
        gamma_power -= g.power;
    }
    // restore units: divide for negative net powers (x/x hits 1 exactly,
    // x * (1/x) need not)
    if (gamma_power > 0) result *= rpow(scale, gamma_power);
    if (gamma_power < 0) result /= rpow(scale, -gamma_power);
    return result;
}

void check_constraints(const std::vector<LinearForm>& deltaset, const Assignment& a, double scale) {
    for (const auto& d : deltaset) {
        const complexd v = d.evaluate(a);
        if (std::abs(v) > kEpsPole * scale)
            throw ConstraintViolated("constraint violated: " + d.str() + " = " +
                                     std::to_string(std::abs(v)) + " at the assignment");
    }
}

std::vector<LinearForm> canonical_request(const std::vector<LinearForm>& deltaset, double scale) {
    Term probe;
    probe.deltas = deltaset;
    auto reduced = reduce_on_support(probe, scale);
    if (!reduced) throw std::invalid_argument("requested delta structure is empty");
    return reduced->deltas;
}

}  // namespace

std::optional<complexd> try_eval_coefficient(const Amplitude& amp,
                                             const std::vector<LinearForm>& deltaset,
                                             const Assignment& assignment,
                                             std::optional<int> final_ground) {
    const Assignment a = assignment.merged_onto(amp.bound);
    const auto want = canonical_request(deltaset, amp.scale);
    check_constraints(want, a, amp.scale);
    const double const_tol = kEpsPole * amp.scale;
    bool found = false;
    complexd sum{0.0, 0.0};
    for (const Term& raw : amp.terms) {
        if (final_ground && raw.final_ground != *final_ground) continue;
        // reduce raw terms so structure keys and delta-normalization scale
        // factors are consistent with the canonical representation
        const Term* t = &raw;
        std::optional<Term> reduced;
        if (!amp.canonical) {
            reduced = reduce_on_support(raw, amp.scale);
            if (!reduced) continue;
            t = &*reduced;
        }
        if (!structure_equal(t->deltas, want, const_tol)) continue;
        found = true;
        sum += eval_term_smooth(*t, a, amp.scale);
    }
    if (!found) return std::nullopt;
    return sum;
}

complexd eval_coefficient(const Amplitude& amp, const std::vector<LinearForm>& deltaset,
                          const Assignment& assignment, std::optional<int> final_ground) {
    auto v = try_eval_coefficient(amp, deltaset, assignment, final_ground);
    if (!v)
        throw std::invalid_argument("delta structure " + structure_str(deltaset) +
                                    " not present in the amplitude");
    return *v;
}

complexd coefficient_total(const Amplitude& amp, const Assignment& assignment,
                           std::optional<int> final_ground) {
    const Assignment a = assignment.merged_onto(amp.bound);
    complexd sum{0.0, 0.0};
    for (const Term& raw : amp.terms) {
        if (final_ground && raw.final_ground != *final_ground) continue;
        const Term* t = &raw;
        std::optional<Term> reduced;
        if (!amp.canonical) {
            reduced = reduce_on_support(raw, amp.scale);
            if (!reduced) continue;
            t = &*reduced;
        }
        bool satisfied = true;
        for (const auto& d : t->deltas)
            if (std::abs(d.evaluate(a)) > kEpsPole * amp.scale) { satisfied = false; break; }
        if (!satisfied) continue;
        sum += eval_term_smooth(*t, a, amp.scale);
    }
    return sum;
}

std::string structure_str(const std::vector<LinearForm>& deltas) {
    std::ostringstream os;
    os << "{";
    for (std::size_t k = 0; k < deltas.size(); ++k) {
        if (k) os << ", ";
        os << "d(" << deltas[k].str() << ")";
    }
    os << "}";
    return os.str();
}

namespace {

Assignment solve_onto_support(const std::vector<LinearForm>& deltas, const Assignment& base) {
    Assignment a = base;
    // deltas are in RREF: leading vars absent from other rows, so each row
    // determines its leading var from the free values directly.
    for (const auto& d : deltas) {
        auto lead = d.leading_symbol();
        if (!lead) continue;
        const LinearForm sol = d.solved_for(*lead);
        a.set(*lead, sol.evaluate(a).real());
    }
    return a;
}

bool near_any_pole(const Amplitude& amp, const std::vector<std::size_t>& idx, const Assignment& a,
                   double guard) {
    for (std::size_t k : idx) {
        const Term& t = amp.terms[k];
        for (const auto& p : t.polefactors)
            if (p.power < 0 && std::abs(p.form.evaluate(a)) < guard) return true;
        for (const auto& g : t.gfactors)
            if (std::abs(g.arg.evaluate(a)) < guard) return true;
    }
    return false;
}

}  // namespace

GridEqualityReport equal_on_grid(const Amplitude& a, const Amplitude& b,
                                 const std::vector<Assignment>& grid, double tol) {
    GridEqualityReport rep;
    const double const_tol = kEpsPole * std::max(a.scale, b.scale);
    auto ga = structures(a);
    auto gb = structures(b);
    // match structure sets
    std::vector<int> match(ga.size(), -1);
    std::vector<bool> used(gb.size(), false);
    for (std::size_t i = 0; i < ga.size(); ++i) {
        for (std::size_t j = 0; j < gb.size(); ++j) {
            if (used[j]) continue;
            if (ga[i].final_ground == gb[j].final_ground &&
                structure_equal(ga[i].deltas, gb[j].deltas, const_tol)) {
                match[i] = static_cast<int>(j);
                used[j] = true;
                break;
            }
        }
    }
    rep.structures_match = true;
    for (std::size_t i = 0; i < ga.size(); ++i)
        if (match[i] < 0) {
            rep.structures_match = false;
            rep.detail += "only in first: " + structure_str(ga[i].deltas) + "; ";
        }
    for (std::size_t j = 0; j < gb.size(); ++j)
        if (!used[j]) {
            rep.structures_match = false;
            rep.detail += "only in second: " + structure_str(gb[j].deltas) + "; ";
        }
    if (!rep.structures_match) {
        rep.pass = false;
        return rep;
    }
    const double guard = 1e-4 * std::max(a.scale, b.scale);
    for (std::size_t i = 0; i < ga.size(); ++i) {
        const auto& gbj = gb[static_cast<std::size_t>(match[i])];
        for (const Assignment& base : grid) {
            const Assignment pt = solve_onto_support(ga[i].deltas, base.merged_onto(a.bound));
            if (near_any_pole(a, ga[i].term_indices, pt, guard) ||
                near_any_pole(b, gbj.term_indices, pt, guard))
                continue;
            complexd va{0.0, 0.0}, vb{0.0, 0.0};
            double maga = 0.0, magb = 0.0;
            for (std::size_t k : ga[i].term_indices) {
                const complexd v = eval_term_smooth(a.terms[k], pt, a.scale);
                va += v;
                maga += std::abs(v);
            }
            for (std::size_t k : gbj.term_indices) {
                const complexd v = eval_term_smooth(b.terms[k], pt, b.scale);
                vb += v;
                magb += std::abs(v);
            }
            const double denom = std::max({std::abs(va), std::abs(vb), 1e-300});
            const double dev = std::abs(va - vb) / denom;
            rep.max_rel_dev = std::max(rep.max_rel_dev, dev);
            if (std::abs(va) > 0.0)
                rep.max_condition = std::max(rep.max_condition, maga / std::abs(va));
            if (std::abs(vb) > 0.0)
                rep.max_condition = std::max(rep.max_condition, magb / std::abs(vb));
        }
    }
    rep.pass = rep.max_rel_dev <= tol;
    return rep;
}

std::vector<Assignment> make_grid(std::uint64_t seed, std::size_t n,
                                  const std::vector<Symbol>& symbols, double center,
                                  double halfwidth) {
    // splitmix64: stable across platforms, unlike std distributions
    auto next = [state = seed]() mutable {
        state += 0x9e3779b97f4a7c15ull;
        std::uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        z = z ^ (z >> 31);
        return z;
    };
    auto uniform01 = [&]() { return static_cast<double>(next() >> 11) * 0x1.0p-53; };
    std::vector<Assignment> grid;
    grid.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
        Assignment a;
        for (Symbol s : symbols) a.set(s, center + (2.0 * uniform01() - 1.0) * halfwidth);
        grid.push_back(a);
    }
    return grid;
}

}  // namespace wqed
