#include "wqed/crosscheck.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "wqed/closedform.hpp"

#include <json.hpp>

namespace wqed {

namespace {
constexpr complexd kI{0.0, 1.0};

Symbol in_sym(int s) { return s == 0 ? Symbol::I0 : Symbol::I1; }
Symbol out_sym(int s) { return s == 0 ? Symbol::F0 : Symbol::F1; }

/// T-matrix transcription as an amplitude: the propagator denominators are
/// written without the emitter gap (it cancels between the levels), the
/// prefactors assembled literally from the display.
Amplitude pg_amplitude(const EmitterSystem& sys, int nu) {
    const double G = sys.gamma_scale();
    Amplitude amp;
    amp.photons = 2;
    amp.scale = G;
    const complexd two_pi_i = 2.0 * std::numbers::pi * kI;
    for (int mu = 1; mu <= 2; ++mu) {
        const double gmu = sys.gamma_of(mu), gnu = sys.gamma_of(nu);
        if (gmu * gnu == 0.0) continue;
        const complexd s_num = two_pi_i * gmu * gnu;  // numerator of each on-shell propagator pair
        for (int s = 0; s <= 1; ++s) {
            for (int sp = 0; sp <= 1; ++sp) {
                for (int lam = 1; lam <= 2; ++lam) {
                    const double gl2 = sys.gamma_of(lam) * sys.gamma_of(lam);
                    if (gl2 == 0.0) continue;
                    // G1-type on-shell propagator: 1/(k_s + dt_nu - p_s' - dt_lam)
                    LinearForm prop = LinearForm::variable(in_sym(s)) -
                                      LinearForm::variable(out_sym(sp));
                    prop = prop.plus_const(complexd{sys.dtilde(nu) - sys.dtilde(lam), 0.0});
                    // G3-type: 1/(D_{x,l} + i pi g^2)
                    LinearForm g3_out = LinearForm::variable(out_sym(sp ^ 1))
                                            .plus_const(complexd{-sys.omega + sys.dtilde(mu), G});
                    LinearForm g3_in = LinearForm::variable(in_sym(s))
                                           .plus_const(complexd{-sys.omega + sys.dtilde(nu), G});
                    // overall out-in energy delta with the ground-level shift
                    LinearForm etot = LinearForm::variable(Symbol::F0) +
                                      LinearForm::variable(Symbol::F1) -
                                      LinearForm::variable(Symbol::I0) -
                                      LinearForm::variable(Symbol::I1);
                    etot = etot.plus_const(complexd{sys.dtilde(mu) - sys.dtilde(nu), 0.0});

                    Term bound;
                    bound.final_ground = mu;
                    bound.origin = "pg:bound";
                    bound.prefactor =
                        (kI / (2.0 * std::numbers::pi * gmu * gnu)) * gl2 * s_num * s_num;
                    bound.with_delta(etot);
                    bound.with_pole(prop, -1);
                    bound.with_pole(g3_in, -1);
                    bound.with_pole(g3_out, -1);
                    amp.terms.push_back(std::move(bound));

                    Term pres;
                    pres.final_ground = mu;
                    pres.origin = "pg:pres";
                    pres.prefactor = (gl2 / (2.0 * gmu * gnu)) * s_num * s_num;
                    // individually preserved pair: p_{s'^1} + dt_mu = k_{s^1} + dt_lam
                    LinearForm pair = LinearForm::variable(out_sym(sp ^ 1)) -
                                      LinearForm::variable(in_sym(s ^ 1));
                    pair = pair.plus_const(complexd{sys.dtilde(mu) - sys.dtilde(lam), 0.0});
                    pres.with_delta(etot);
                    pres.with_delta(pair);
                    pres.with_pole(g3_in, -1);
                    pres.with_pole(g3_out, -1);
                    amp.terms.push_back(std::move(pres));
                }
            }
        }
    }
    return amp;
}

Amplitude filter_terms(const Amplitude& amp, std::size_t ndeltas) {
    Amplitude out = amp;
    out.terms.clear();
    for (const auto& t : amp.terms)
        if (t.deltas.size() == ndeltas) out.terms.push_back(t);
    return out;
}

Amplitude drop_origin_prefix(const Amplitude& amp, const std::string& prefix) {
    Amplitude out = amp;
    out.terms.clear();
    for (const auto& t : amp.terms)
        if (t.origin.rfind(prefix, 0) != 0) out.terms.push_back(t);
    return out;
}

}  // namespace

std::string report_json(const CheckReport& rep) {
    nlohmann::json j;
    j["check"] = rep.check;
    j["points"] = rep.points;
    j["max_rel_dev"] = rep.max_rel_dev;
    j["pass"] = rep.pass;
    if (!rep.detail.empty()) j["detail"] = rep.detail;
    return j.dump(2);
}

CheckReport fan_equivalence(const EmitterSystem& sys, int grid_size, std::uint64_t seed) {
    CheckReport rep;
    rep.check = "fan";
    rep.points = grid_size;
    const double i0 = sys.omega + 1e14, i1 = sys.omega - 1e14;
    const Amplitude raw = canonicalize(amp_two_tls(sys, i0, i1));
    const Amplitude fan = amp_two_tls_fan(sys, i0, i1);
    const auto grid = make_grid(seed, static_cast<std::size_t>(grid_size),
                                {Symbol::F1, Symbol::I0, Symbol::I1}, sys.omega, 3e14);
    const auto eq = equal_on_grid(raw, fan, grid, 1e-10);
    rep.max_rel_dev = eq.max_rel_dev;
    rep.pass = eq.pass;
    rep.detail = eq.structures_match ? "" : eq.detail;
    return rep;
}

complexd pg_bound_coefficient(const EmitterSystem& sys, int mu, int nu, double k0, double k1,
                              double p0, double p1) {
    if (sys.kind != EmitterKind::Lambda)
        throw std::invalid_argument("pg_bound_coefficient: Lambda system required");
    const double G = sys.gamma_scale();
    const double gmu = sys.gamma_of(mu), gnu = sys.gamma_of(nu);
    const double k[2] = {k0, k1}, p[2] = {p0, p1};
    const complexd two_pi_i = 2.0 * std::numbers::pi * kI;
    complexd total{0.0, 0.0};
    for (int s = 0; s <= 1; ++s) {
        for (int sp = 0; sp <= 1; ++sp) {
            for (int lam = 1; lam <= 2; ++lam) {
                const double gl2 = sys.gamma_of(lam) * sys.gamma_of(lam);
                const complexd prop = k[s] + sys.dtilde(nu) - p[sp] - sys.dtilde(lam);
                const complexd g3_in = complexd{k[s] - sys.omega + sys.dtilde(nu), G};
                const complexd g3_out = complexd{p[sp ^ 1] - sys.omega + sys.dtilde(mu), G};
                if (std::abs(prop) < kEpsPole * G || std::abs(g3_in) < kEpsPole * G ||
                    std::abs(g3_out) < kEpsPole * G)
                    throw OnPoleError("pg_bound_coefficient: on-pole evaluation point");
                total += (kI / (2.0 * std::numbers::pi * gmu * gnu)) * gl2 *
                         (two_pi_i * gmu * gnu / g3_out) * (two_pi_i * gmu * gnu / g3_in) / prop;
            }
        }
    }
    return total;
}

CheckReport pg_equivalence(const EmitterSystem& sys, int grid_size, std::uint64_t seed) {
    if (sys.kind != EmitterKind::Lambda)
        throw std::invalid_argument("pg_equivalence: Lambda system required");
    CheckReport rep;
    rep.check = "pg";
    rep.points = grid_size;
    const int nu = 1;
    const double i0 = sys.omega + 1e14, i1 = sys.omega - 1e14;
    Amplitude lhs = amp_two_lambda(sys, nu, i0, i1);
    lhs = canonicalize(drop_origin_prefix(lhs, "N:"));  // A_{mu nu} - N_{mu nu}
    lhs.bound = Assignment{};
    Amplitude rhs = canonicalize(pg_amplitude(sys, nu));

    const auto grid = make_grid(seed, static_cast<std::size_t>(grid_size),
                                {Symbol::F1, Symbol::I0, Symbol::I1}, sys.omega, 3e14);
    const auto eq_bound =
        equal_on_grid(filter_terms(lhs, 1), filter_terms(rhs, 1), grid, 1e-10);
    const auto eq_pres = equal_on_grid(filter_terms(lhs, 2), filter_terms(rhs, 2), grid, 1e-10);
    rep.max_rel_dev = std::max(eq_bound.max_rel_dev, eq_pres.max_rel_dev);
    rep.pass = eq_bound.pass && eq_pres.pass;
    std::ostringstream os;
    os << "bound block max dev " << eq_bound.max_rel_dev << ", preserving block max dev "
       << eq_pres.max_rel_dev;
    if (!eq_bound.structures_match) os << "; bound structures differ: " << eq_bound.detail;
    if (!eq_pres.structures_match) os << "; preserving structures differ: " << eq_pres.detail;
    rep.detail = os.str();
    return rep;
}

CheckReport unitarity_check(const EmitterSystem& sys, int points, std::uint64_t seed) {
    CheckReport rep;
    rep.check = "unitarity";
    rep.points = points;
    const double G = sys.gamma_scale();
    const auto grid = make_grid(seed, static_cast<std::size_t>(points), {Symbol::I}, 0.0, 1e6 * G);
    double worst = 0.0;
    for (const auto& a : grid) {
        const double D = *a.get(Symbol::I);
        if (sys.kind == EmitterKind::TLS) {
            const double dev = std::abs(std::abs(t_tls_of_detuning(sys, D)) - 1.0);
            worst = std::max(worst, dev);
        } else {
            for (int nu = 1; nu <= 2; ++nu) {
                const complexd s_keep = s_lambda(sys, nu, nu, D);
                const complexd s_flip = s_lambda(sys, nu == 1 ? 2 : 1, nu, D);
                const double row = std::norm(complexd{1.0, 0.0} + s_keep) + std::norm(s_flip);
                worst = std::max(worst, std::abs(row - 1.0));
            }
        }
    }
    rep.max_rel_dev = worst;
    rep.pass = worst < 1e-12;
    return rep;
}

}  // namespace wqed
