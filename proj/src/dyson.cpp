#include "wqed/dyson.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>

#include "wqed/closedform.hpp"

#include <json.hpp>

namespace wqed {

namespace {

constexpr complexd kI{0.0, 1.0};

Symbol in_sym(int p, int s) {
    if (p == 1) return Symbol::I;
    return s == 0 ? Symbol::I0 : Symbol::I1;
}
Symbol out_sym(int p, int s) {
    if (p == 1) return Symbol::F;
    return s == 0 ? Symbol::F0 : Symbol::F1;
}

double rpow(double x, int p) {
    double out = 1.0;
    for (int k = 0; k < p; ++k) out *= x;
    return out;
}

// 2 (-i)^n pi^q : (-i)^n = (-1)^(n/2) for even n
complexd order_prefactor(int n, int pi_power) {
    const double sign = (n / 2) % 2 == 0 ? 1.0 : -1.0;
    return complexd{2.0 * sign * rpow(std::numbers::pi, pi_power), 0.0};
}

void check_order(int n, int p) {
    if (n < 0 || n % 2 != 0) throw std::invalid_argument("Dyson order must be even and >= 0");
    if (p != 1 && p != 2) throw std::invalid_argument("photon count must be 1 or 2");
}

}  // namespace

std::vector<Diagram> enumerate_diagrams(int n, int p, EmitterKind kind) {
    check_order(n, p);
    if (n < 2) throw std::invalid_argument("enumerate_diagrams: order must be >= 2");
    std::vector<Diagram> out;
    if (p == 1) {
        Diagram d;
        d.order = n;
        d.photons = 1;
        d.loops_first = n / 2 - 1;
        out.push_back(d);
        return out;
    }
    const int pairs = n / 2;
    for (int s = 0; s <= 1; ++s) {
        for (int sp = 0; sp <= 1; ++sp) {
            Diagram nm;
            nm.order = n;
            nm.photons = 2;
            nm.mixing = false;
            nm.s = s;
            nm.sp = sp;
            nm.loops_first = pairs - 1;
            out.push_back(nm);
            if (pairs < 2) continue;
            for (int k1 = 0; k1 <= pairs - 2; ++k1) {
                Diagram m;
                m.order = n;
                m.photons = 2;
                m.mixing = true;
                m.s = s;
                m.sp = sp;
                m.loops_first = k1;
                m.loops_second = pairs - 2 - k1;
                if (kind == EmitterKind::Lambda) {
                    for (int lam = 1; lam <= 2; ++lam) {
                        m.intermediate = lam;
                        out.push_back(m);
                    }
                } else {
                    out.push_back(m);
                }
            }
        }
    }
    return out;
}

Term diagram_amplitude(const Diagram& d, const EmitterSystem& sys, int nu, int mu) {
    const int n = d.order;
    const bool lam_sys = sys.kind == EmitterKind::Lambda;
    const double gsq = sys.coupling_sq();
    const int nu_lvl = lam_sys ? nu : 0;
    Term t;
    t.final_ground = lam_sys ? mu : 0;

    if (d.photons == 1) {
        t.origin = "dyson:n" + std::to_string(n);
        t.prefactor = order_prefactor(n, n / 2);
        if (lam_sys)
            t.prefactor *= sys.gamma_of(mu) * sys.gamma_of(nu) * rpow(gsq, n / 2 - 1);
        else
            t.prefactor *= rpow(sys.gamma1, n);
        t.with_g(detuning_form(sys, Symbol::I, nu_lvl), n / 2);
        LinearForm darg = LinearForm::variable(Symbol::F) - LinearForm::variable(Symbol::I);
        if (lam_sys) darg = darg.plus_const(complexd{sys.dtilde(mu) - sys.dtilde(nu), 0.0});
        t.with_delta(darg);
        return t;
    }

    const Symbol is = in_sym(2, d.s), isb = in_sym(2, d.s ^ 1);
    const Symbol fs = out_sym(2, d.sp), fsb = out_sym(2, d.sp ^ 1);
    if (!d.mixing) {
        t.origin = "dyson:nm:n" + std::to_string(n) + ":s" + std::to_string(d.s) + "s'" +
                   std::to_string(d.sp);
        t.prefactor = order_prefactor(n, n / 2);
        if (lam_sys)
            t.prefactor *= sys.gamma_of(mu) * sys.gamma_of(nu) * rpow(gsq, n / 2 - 1);
        else
            t.prefactor *= rpow(sys.gamma1, n);
        t.with_g(detuning_form(sys, is, nu_lvl), n / 2);
        LinearForm d1 = LinearForm::variable(fs) - LinearForm::variable(is);
        if (lam_sys) d1 = d1.plus_const(complexd{sys.dtilde(mu) - sys.dtilde(nu), 0.0});
        t.with_delta(d1);
        t.with_delta(LinearForm::variable(fsb) - LinearForm::variable(isb));
        return t;
    }

    const int kap = lam_sys ? d.intermediate : 0;
    t.origin = "dyson:mix:n" + std::to_string(n) + ":s" + std::to_string(d.s) + "s'" +
               std::to_string(d.sp) + (lam_sys ? ":l" + std::to_string(kap) : "");
    t.prefactor = order_prefactor(n, n / 2 - 1);
    if (lam_sys)
        t.prefactor *= sys.gamma_of(mu) * sys.gamma_of(nu) * sys.gamma_of(kap) * sys.gamma_of(kap) *
                       rpow(gsq, d.loops_first + d.loops_second);
    else
        t.prefactor *= rpow(sys.gamma1, n);

    const LinearForm Da = detuning_form(sys, is, nu_lvl);          // first absorption
    const LinearForm Dmid = Da - detuning_form(sys, fs, kap);      // first emission residual
    const LinearForm Db = Dmid + detuning_form(sys, isb, kap);     // second absorption running total
    t.with_g(Da, 1 + d.loops_first);
    t.with_g(Dmid, 1);
    t.with_g(Db, 1 + d.loops_second);
    LinearForm cons = LinearForm::variable(Symbol::F0) + LinearForm::variable(Symbol::F1) -
                      LinearForm::variable(Symbol::I0) - LinearForm::variable(Symbol::I1);
    if (lam_sys) cons = cons.plus_const(complexd{sys.dtilde(mu) - sys.dtilde(nu), 0.0});
    t.with_delta(cons);
    return t;
}

std::vector<Term> diagram_amplitude_unfolded(const Diagram& d, const EmitterSystem& sys, int nu,
                                             int mu) {
    if (sys.kind != EmitterKind::Lambda) return {diagram_amplitude(d, sys, nu, mu)};
    const Term folded = diagram_amplitude(d, sys, nu, mu);
    const int loops = d.loops_first + d.loops_second;
    const double gsq = sys.coupling_sq();
    std::vector<Term> out;
    // every loop independently visits level 1 or 2; the g structure is
    // unchanged, only the gamma_l^2 weight differs per choice
    for (int mask = 0; mask < (1 << loops); ++mask) {
        Term t = folded;
        double w = 1.0;
        for (int b = 0; b < loops; ++b) {
            const int lvl = (mask >> b) & 1 ? 2 : 1;
            w *= sys.gamma_of(lvl) * sys.gamma_of(lvl);
        }
        t.prefactor *= w / rpow(gsq, loops);
        t.origin += ":unfold" + std::to_string(mask);
        out.push_back(std::move(t));
    }
    return out;
}

OrderTerm order_term(int n, int p, const EmitterSystem& sys, int nu) {
    check_order(n, p);
    require_valid(sys);
    const bool lam_sys = sys.kind == EmitterKind::Lambda;
    OrderTerm ot;
    ot.order = n;
    Amplitude& amp = ot.amplitude;
    amp.photons = p;
    amp.scale = sys.gamma_scale();
    if (n == 0) {
        // free propagation: every input passes through
        if (p == 1) {
            Term t;
            t.origin = "dyson:n0";
            t.final_ground = lam_sys ? nu : 0;
            t.with_delta(LinearForm::variable(Symbol::F) - LinearForm::variable(Symbol::I));
            amp.terms.push_back(std::move(t));
        } else {
            for (int sp = 0; sp <= 1; ++sp) {
                Term t;
                t.origin = "dyson:n0";
                t.final_ground = lam_sys ? nu : 0;
                t.with_delta(LinearForm::variable(out_sym(2, sp)) - LinearForm::variable(Symbol::I0));
                t.with_delta(LinearForm::variable(out_sym(2, sp ^ 1)) -
                             LinearForm::variable(Symbol::I1));
                amp.terms.push_back(std::move(t));
            }
        }
        return ot;
    }
    const auto diags = enumerate_diagrams(n, p, sys.kind);
    const int mu_lo = lam_sys ? 1 : 1;
    const int mu_hi = lam_sys ? 2 : 1;
    for (const Diagram& d : diags) {
        for (int mu = mu_lo; mu <= mu_hi; ++mu) {
            Term t = diagram_amplitude(d, sys, nu, mu);
            if (std::abs(t.prefactor) > 0.0) amp.terms.push_back(std::move(t));
        }
    }
    return ot;
}

PartialSumReport partial_sum(int n_max, int p, const EmitterSystem& sys, const Assignment& point,
                             const std::vector<LinearForm>& deltaset, int nu,
                             std::optional<int> mu) {
    check_order(n_max % 2 == 0 ? n_max : n_max - 1, p);
    require_valid(sys);
    PartialSumReport rep;
    const double G = sys.gamma_scale();

    // worst convergence ratio |pi gamma^2 g| = Gamma/|Delta| over the
    // detunings entering the geometric sums at this point
    const bool lam_sys = sys.kind == EmitterKind::Lambda;
    const int nu_lvl = lam_sys ? nu : 0;
    const int mu_lvl = lam_sys ? mu.value_or(nu) : 0;
    double worst = 0.0;
    auto ratio_of = [&](Symbol s, int lvl) {
        const auto v = point.get(s);
        if (!v) return;
        const double D = std::abs(detuning(
            sys, lvl == 0 ? std::nullopt : std::optional<GroundLabel>(GroundLabel(lvl)), *v));
        if (D > 0.0) worst = std::max(worst, G / D);
    };
    if (p == 1) {
        ratio_of(Symbol::I, nu_lvl);
    } else {
        ratio_of(Symbol::I0, nu_lvl);
        ratio_of(Symbol::I1, nu_lvl);
        ratio_of(Symbol::F0, mu_lvl);
        ratio_of(Symbol::F1, mu_lvl);
    }
    rep.ratio = worst;
    rep.divergent = worst >= 1.0;

    complexd running{0.0, 0.0};
    for (int n = 0; n <= n_max; n += 2) {
        const OrderTerm ot = order_term(n, p, sys, nu);
        const auto c = try_eval_coefficient(ot.amplitude, deltaset, point, mu);
        const complexd step = c.value_or(complexd{0.0, 0.0});
        running += step;
        rep.orders.push_back(n);
        rep.partials.push_back(running);
        if (n > 0 && std::abs(running) > 0.0 && std::abs(step) <= 1e-12 * std::abs(running) &&
            !rep.converged) {
            rep.converged = true;
            rep.converged_at = n;
        }
    }
    rep.value = running;
    return rep;
}

namespace {

// Wick pairing enumeration for <0| a_f0 a_f1 (a+_e1 a_e2 ... a_en) a+_i1 a+_i0 |0>.
// Positions: 0,1 = f annihilations; 2..n+1 = slots 1..n (odd slot = creation);
// n+2, n+3 = input creations. An annihilation must pair a creation to its right.
struct Pairing {
    std::vector<int> partner;  // index -> paired index
};

void enumerate_pairings(int n, std::vector<int>& partner, int pos,
                        const std::function<void(const Pairing&)>& emit) {
    const int total = n + 4;
    while (pos < total && partner[pos] >= 0) ++pos;
    if (pos == total) {
        emit(Pairing{partner});
        return;
    }
    auto is_creation = [&](int idx) {
        if (idx <= 1) return false;
        if (idx >= n + 2) return true;
        return (idx - 1) % 2 == 1;  // slot j = idx-1; odd j is a creation
    };
    if (is_creation(pos)) return;  // creation with no annihilation to its left: dead branch
    for (int j = pos + 1; j < total; ++j) {
        if (partner[j] >= 0 || !is_creation(j)) continue;
        partner[pos] = j;
        partner[j] = pos;
        enumerate_pairings(n, partner, pos + 1, emit);
        partner[pos] = partner[j] = -1;
    }
}

}  // namespace

ContractionCensus count_contractions(int n) {
    if (n < 2 || n % 2 != 0) throw std::invalid_argument("count_contractions: even n >= 2 required");
    ContractionCensus census;
    census.mixing_split_counts.assign(std::max(0, n / 2 - 1), 0);
    std::vector<int> partner(n + 4, -1);
    enumerate_pairings(n, partner, 0, [&](const Pairing& pr) {
        ++census.raw;
        const auto slot = [&](int idx) { return idx - 1; };  // 1..n
        // internal contraction (both ends in slot range) must join adjacent times
        bool survives = true;
        std::vector<std::pair<int, int>> internal;  // (absorption slot, emission slot)
        for (int idx = 2; idx < n + 2; ++idx) {
            const int j = pr.partner[idx];
            if (j < idx || j >= n + 2 || idx < 2) continue;
            internal.emplace_back(slot(idx), slot(j));
            if (slot(j) != slot(idx) + 1) survives = false;
        }
        if (!survives) return;
        ++census.surviving;
        // classification: a direct f-to-input pairing is a non-mixing term
        const bool f0_direct = pr.partner[0] >= n + 2;
        const bool f1_direct = pr.partner[1] >= n + 2;
        if (f0_direct || f1_direct) {
            ++census.non_mixing;
            return;
        }
        // mixing: slot n pairs the first-absorbed input; the other input's
        // absorption slot m splits the loops into before/after
        int m = -1;
        for (int idx = 2; idx < n + 2; ++idx) {
            if (slot(idx) % 2 == 0 && pr.partner[idx] >= n + 2 && slot(idx) != n) m = slot(idx);
        }
        int k1 = 0;
        for (const auto& [a, b] : internal)
            if (a > m) ++k1;
        if (k1 < static_cast<int>(census.mixing_split_counts.size()))
            ++census.mixing_split_counts[k1];
    });
    return census;
}

namespace {
nlohmann::json diagram_to_json(const Diagram& d) {
    nlohmann::json j;
    j["n"] = d.order;
    j["p"] = d.photons;
    if (d.photons == 2) {
        j["s"] = d.s;
        j["s'"] = d.sp;
    }
    j["m"] = d.split_m();
    j["loops"] = d.mixing ? nlohmann::json::array({d.loops_first, d.loops_second})
                          : nlohmann::json::array({d.loops_first});
    nlohmann::json flags = nlohmann::json::array();
    flags.push_back(d.mixing ? "mixing" : "non-mixing");
    if (d.intermediate != 0) flags.push_back("intermediate-level-" + std::to_string(d.intermediate));
    j["flags"] = flags;
    return j;
}
}  // namespace

std::string diagram_json(const Diagram& d) { return diagram_to_json(d).dump(2); }

std::string diagrams_json(const std::vector<Diagram>& ds) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& d : ds) j.push_back(diagram_to_json(d));
    return j.dump(2);
}

A8Report a8_fixture_check(std::uint64_t seed) {
    const EmitterSystem sys = EmitterSystem::tls(2e15, 2e4);
    const double g = sys.gamma1;
    const double g8 = rpow(g, 8);
    const double pi = std::numbers::pi;

    A8Report rep;
    const auto census = count_contractions(8);
    rep.raw_contractions = census.raw;
    rep.surviving_terms = census.surviving;

    const auto diags = enumerate_diagrams(8, 2, EmitterKind::TLS);
    rep.species_count = 0;
    {
        bool nm = false;
        std::vector<bool> seen(3, false);
        for (const auto& d : diags) {
            if (!d.mixing) nm = true;
            else seen[d.loops_first] = true;
        }
        rep.species_count = (nm ? 1 : 0);
        for (bool b : seen) rep.species_count += b ? 1 : 0;
    }

    // hard-coded transcription of the explicit order-8 species, per (s,s')
    struct SpeciesSpec {
        std::string name;
        int k1;  // -1 marks the non-mixing species
    };
    const std::vector<SpeciesSpec> species = {
        {"non-mixing: 2 pi^4 g^8 g^4(D_is) d(fs'-is) d(fs'1-is1)", -1},
        {"(b): 2 pi^3 g^8 g^3(D_is) g(D_is-D_fs') g(D_fs'1)", 2},
        {"(c): 2 pi^3 g^8 g^2(D_is) g(D_is-D_fs') g^2(D_fs'1)", 1},
        {"(d): 2 pi^3 g^8 g(D_is) g(D_is-D_fs') g^3(D_fs'1)", 0},
    };

    auto grid = make_grid(seed, 50, {Symbol::F1, Symbol::I0, Symbol::I1}, 2e15, 3e14);

    bool all_pass = true;
    for (const auto& spec : species) {
        A8SpeciesResult r;
        r.name = spec.name;
        r.structural_pass = true;
        for (int s = 0; s <= 1 && r.structural_pass; ++s) {
            for (int sp = 0; sp <= 1 && r.structural_pass; ++sp) {
                // transcribed term
                Term trans;
                const Symbol is = s == 0 ? Symbol::I0 : Symbol::I1;
                const Symbol isb = s == 0 ? Symbol::I1 : Symbol::I0;
                const Symbol fs = sp == 0 ? Symbol::F0 : Symbol::F1;
                const Symbol fsb = sp == 0 ? Symbol::F1 : Symbol::F0;
                const Diagram* match = nullptr;
                if (spec.k1 < 0) {
                    trans.prefactor = 2.0 * rpow(pi, 4) * g8;
                    trans.with_g(detuning_form(sys, is), 4);
                    trans.with_delta(LinearForm::variable(fs) - LinearForm::variable(is));
                    trans.with_delta(LinearForm::variable(fsb) - LinearForm::variable(isb));
                    for (const auto& d : diags)
                        if (!d.mixing && d.s == s && d.sp == sp) match = &d;
                } else {
                    trans.prefactor = 2.0 * rpow(pi, 3) * g8;
                    trans.with_g(detuning_form(sys, is), 1 + spec.k1);
                    trans.with_g(detuning_form(sys, is) - detuning_form(sys, fs), 1);
                    trans.with_g(detuning_form(sys, fsb), 3 - spec.k1);
                    trans.with_delta(LinearForm::variable(Symbol::F0) +
                                     LinearForm::variable(Symbol::F1) -
                                     LinearForm::variable(Symbol::I0) -
                                     LinearForm::variable(Symbol::I1));
                    for (const auto& d : diags)
                        if (d.mixing && d.s == s && d.sp == sp && d.loops_first == spec.k1)
                            match = &d;
                }
                if (!match) {
                    r.structural_pass = false;
                    break;
                }
                const Term built = diagram_amplitude(*match, sys);
                const auto tr = reduce_on_support(trans, sys.gamma_scale());
                const auto br = reduce_on_support(built, sys.gamma_scale());
                if (!tr || !br) {
                    r.structural_pass = false;
                    break;
                }
                // structural: identical delta and g multisets after reduction
                if (tr->deltas.size() != br->deltas.size() ||
                    tr->gfactors.size() != br->gfactors.size()) {
                    r.structural_pass = false;
                    break;
                }
                for (std::size_t k = 0; k < tr->deltas.size(); ++k)
                    if (!tr->deltas[k].approx_equal(br->deltas[k], 1e-9 * sys.gamma_scale()))
                        r.structural_pass = false;
                for (std::size_t k = 0; k < tr->gfactors.size(); ++k)
                    if (tr->gfactors[k].power != br->gfactors[k].power ||
                        !tr->gfactors[k].arg.approx_equal(br->gfactors[k].arg,
                                                          1e-9 * sys.gamma_scale()))
                        r.structural_pass = false;
                if (!r.structural_pass) break;
                // numeric: evaluate both on the support of the term's deltas
                Amplitude wa, wb;
                wa.photons = wb.photons = 2;
                wa.scale = wb.scale = sys.gamma_scale();
                wa.terms.push_back(*tr);
                wb.terms.push_back(*br);
                wa.canonical = wb.canonical = true;
                for (const auto& base : grid) {
                    Assignment pt = base;
                    // solve the deltas for their leading variables
                    for (const auto& dl : tr->deltas) {
                        auto lead = dl.leading_symbol();
                        if (lead) pt.set(*lead, dl.solved_for(*lead).evaluate(pt).real());
                    }
                    const complexd va = eval_coefficient(wa, tr->deltas, pt);
                    const complexd vb = eval_coefficient(wb, br->deltas, pt);
                    const double dev = std::abs(va - vb) / std::max(std::abs(va), 1e-300);
                    r.max_rel_dev = std::max(r.max_rel_dev, dev);
                }
            }
        }
        const bool ok = r.structural_pass && r.max_rel_dev < 1e-12;
        all_pass = all_pass && ok;
        rep.species.push_back(std::move(r));
    }
    rep.pass = all_pass && rep.raw_contractions == 32 && rep.surviving_terms == 16 &&
               rep.species_count == 4;
    return rep;
}

}  // namespace wqed
