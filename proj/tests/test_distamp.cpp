#include <doctest.h>

#include <cmath>
#include <numbers>

#include "wqed/closedform.hpp"
#include "wqed/distamp.hpp"

using namespace wqed;

namespace {
LinearForm var(Symbol s) { return LinearForm::variable(s); }
const double pi = std::numbers::pi;
}

TEST_CASE("expand_g of a first power gives the two defining branches") {
    Term t;
    t.prefactor = {2.0, 0.0};
    t.with_g(var(Symbol::F) - var(Symbol::I));
    const auto branches = expand_g(t);
    REQUIRE(branches.size() == 2);
    // pi * delta branch
    CHECK(branches[0].deltas.size() == 1);
    CHECK(branches[0].prefactor == complexd{2.0 * pi, 0.0});
    // i / L branch
    CHECK(branches[1].polefactors.size() == 1);
    CHECK(branches[1].polefactors.front().power == -1);
    CHECK(branches[1].prefactor == complexd{0.0, 2.0});
}

TEST_CASE("expand_g rejects higher powers (squared deltas)") {
    Term t;
    t.with_g(var(Symbol::F) - var(Symbol::I), 2);
    CHECK_THROWS_AS((void)expand_g(t), IllDefinedDistribution);
    // ... but the off-shell numeric value of g(L)^2 is (i/L)^2 = -1/L^2
    Amplitude amp;
    amp.photons = 1;
    amp.scale = 1.0;
    Term u;
    u.with_delta(var(Symbol::F) - var(Symbol::I));  // carrier structure
    u.with_g(var(Symbol::I).plus_const(complexd{-5.0, 0.0}), 2);
    amp.terms.push_back(u);
    Assignment a;
    a.set(Symbol::F, 7.0);
    a.set(Symbol::I, 7.0);
    const complexd v = eval_coefficient(amp, {var(Symbol::F) - var(Symbol::I)}, a);
    CHECK(std::abs(v - complexd{-0.25, 0.0}) < 1e-15);  // -1/(7-5)^2
}

TEST_CASE("expand_g evaluation consistency off-shell") {
    // sum of the expanded delta-free terms == original with g(L) := i/L
    Amplitude amp;
    amp.photons = 2;
    amp.scale = 1.0;
    Term t;
    t.prefactor = {0.3, -1.7};
    t.with_g(var(Symbol::I0) - var(Symbol::F0));
    t.with_g((var(Symbol::F1) - var(Symbol::I1)).plus_const(complexd{0.25, 0.0}));
    t.with_pole(var(Symbol::F0).plus_const(complexd{0.0, 2.0}), -1);
    for (const auto& pt : make_grid(3, 25, {Symbol::F0, Symbol::F1, Symbol::I0, Symbol::I1}, 0.0, 9.0)) {
        bool off_shell = true;
        for (const auto& g : t.gfactors)
            if (std::abs(g.arg.evaluate(pt)) < 1e-3) off_shell = false;
        if (!off_shell) continue;
        complexd direct = t.prefactor;
        for (const auto& g : t.gfactors) direct *= complexd{0.0, 1.0} / g.arg.evaluate(pt);
        for (const auto& p : t.polefactors) direct /= p.form.evaluate(pt);
        complexd summed{0.0, 0.0};
        for (const auto& b : expand_g(t)) {
            if (b.deltas.size() != t.deltas.size()) continue;  // delta branches vanish off-shell
            complexd v = b.prefactor;
            for (const auto& p : b.polefactors) {
                complexd f = p.form.evaluate(pt);
                v *= p.power < 0 ? complexd{1.0, 0.0} / f : f;
            }
            summed += v;
        }
        CHECK(std::abs(summed - direct) <= 1e-12 * std::abs(direct));
    }
}

TEST_CASE("canonicalize: fixed point, idempotence, cancellation") {
    Amplitude amp;
    amp.photons = 1;
    amp.scale = 1.0;
    Term t;
    t.prefactor = {1.5, 0.5};
    t.with_delta(var(Symbol::F) - var(Symbol::I));
    amp.terms.push_back(t);

    SUBCASE("single term without g factors is unchanged") {
        const Amplitude c = canonicalize(amp);
        REQUIRE(c.terms.size() == 1);
        CHECK(c.terms.front().prefactor == t.prefactor);
        CHECK(c.terms.front().deltas.front().compare(t.deltas.front()) == 0);
    }
    SUBCASE("idempotent") {
        const Amplitude c1 = canonicalize(amp);
        const Amplitude c2 = canonicalize(c1);
        REQUIRE(c1.terms.size() == c2.terms.size());
        for (std::size_t k = 0; k < c1.terms.size(); ++k) {
            CHECK(c1.terms[k].prefactor == c2.terms[k].prefactor);
            CHECK(c1.terms[k].deltas.size() == c2.terms[k].deltas.size());
        }
    }
    SUBCASE("opposite coefficients cancel to an empty amplitude") {
        Term u = t;
        u.prefactor = -t.prefactor;
        amp.terms.push_back(u);
        CHECK(canonicalize(amp).terms.empty());
    }
}

TEST_CASE("canonicalize is idempotent on the full lambda amplitude") {
    const auto sys = EmitterSystem::lambda(2e15, 2e4, 1.3e4, 1e13, 2e14);
    const Amplitude c1 = canonicalize(amp_two_lambda(sys, 1, 2.1e15, 1.9e15));
    const Amplitude c2 = canonicalize(c1);
    REQUIRE(c1.terms.size() == c2.terms.size());
    for (std::size_t k = 0; k < c1.terms.size(); ++k) {
        const Term& a = c1.terms[k];
        const Term& b = c2.terms[k];
        CHECK(a.prefactor == b.prefactor);
        CHECK(a.final_ground == b.final_ground);
        REQUIRE(a.deltas.size() == b.deltas.size());
        for (std::size_t j = 0; j < a.deltas.size(); ++j)
            CHECK(a.deltas[j].compare(b.deltas[j]) == 0);
        REQUIRE(a.polefactors.size() == b.polefactors.size());
        for (std::size_t j = 0; j < a.polefactors.size(); ++j) {
            CHECK(a.polefactors[j].form.compare(b.polefactors[j].form) == 0);
            CHECK(a.polefactors[j].power == b.polefactors[j].power);
        }
    }
}

TEST_CASE("canonicalize uses deltas to eliminate variables from smooth factors") {
    // delta(f0+f1-i0-i1) * 1/(f0 - c) becomes a factor in f1 on the support
    Amplitude amp;
    amp.photons = 2;
    amp.scale = 1.0;
    Term t;
    t.with_delta(var(Symbol::F0) + var(Symbol::F1) - var(Symbol::I0) - var(Symbol::I1));
    t.with_pole(var(Symbol::F0).plus_const(complexd{0.0, 2.0}), -1);
    amp.terms.push_back(t);
    const Amplitude c = canonicalize(amp);
    REQUIRE(c.terms.size() == 1);
    const auto& pf = c.terms.front().polefactors.front();
    CHECK_FALSE(pf.form.has_symbol(Symbol::F0));
    CHECK(pf.form.has_symbol(Symbol::F1));
}

TEST_CASE("squared delta is rejected as ill-defined") {
    Amplitude amp;
    amp.photons = 1;
    amp.scale = 1.0;
    Term t;
    t.with_delta(var(Symbol::F) - var(Symbol::I));
    t.with_delta((var(Symbol::F) - var(Symbol::I)).scaled(Rational(2)));
    amp.terms.push_back(t);
    CHECK_THROWS_AS((void)canonicalize(amp), IllDefinedDistribution);
}

TEST_CASE("pinch singularity: a denominator vanishing on the delta support") {
    Amplitude amp;
    amp.photons = 1;
    amp.scale = 1.0;
    Term t;
    t.with_delta(var(Symbol::F) - var(Symbol::I));
    t.with_pole(var(Symbol::F) - var(Symbol::I), -1);
    amp.terms.push_back(t);
    CHECK_THROWS_AS((void)canonicalize(amp), PinchSingularity);
}

TEST_CASE("expanding a raw mixing term gives the two-line split") {
    // one g(D_is - D_fs') term splits into a delta-collapsed
    // frequency-preserving piece and a principal-value piece
    const auto sys = EmitterSystem::tls(2e15, 2e4);
    const Amplitude raw = amp_two_tls(sys, 2.1e15, 1.9e15);
    const Term* mix = nullptr;
    for (const auto& t : raw.terms)
        if (t.deltas.size() == 1 && !t.gfactors.empty()) { mix = &t; break; }
    REQUIRE(mix != nullptr);
    Amplitude one;
    one.photons = 2;
    one.scale = raw.scale;
    one.terms.push_back(*mix);
    const Amplitude split = canonicalize(one);
    REQUIRE(split.terms.size() == 2);
    int collapsed = 0, principal = 0;
    for (const auto& t : split.terms) {
        CHECK(t.gfactors.empty());
        if (t.deltas.size() == 2) ++collapsed;       // permutation structure
        if (t.deltas.size() == 1) {
            ++principal;
            // the principal piece carries a real-axis denominator
            bool has_real_pole = false;
            for (const auto& p : t.polefactors)
                if (p.power < 0 && p.form.constant().imag() == 0.0) has_real_pole = true;
            CHECK(has_real_pole);
        }
    }
    CHECK(collapsed == 1);
    CHECK(principal == 1);
}

TEST_CASE("canonicalize preserves coefficients on shared structures") {
    const auto sys = EmitterSystem::tls(2e15, 2e4);
    const Amplitude raw = amp_two_tls(sys, 2.1e15, 1.9e15);
    const Amplitude can = canonicalize(raw);
    // the raw mixing term (single conservation delta) evaluates identically
    std::vector<LinearForm> cons = {var(Symbol::F0) + var(Symbol::F1) - var(Symbol::I0) -
                                    var(Symbol::I1)};
    for (const auto& base : make_grid(17, 30, {Symbol::F1, Symbol::I0, Symbol::I1}, 2e15, 2.5e14)) {
        Assignment pt = base;
        pt.set(Symbol::F0, *base.get(Symbol::I0) + *base.get(Symbol::I1) - *base.get(Symbol::F1));
        complexd vraw, vcan;
        try {
            vraw = eval_coefficient(raw, cons, pt);
            vcan = eval_coefficient(can, cons, pt);
        } catch (const OnPoleError&) {
            continue;
        }
        CHECK(std::abs(vraw - vcan) <= 1e-10 * std::abs(vcan));
    }
}

TEST_CASE("canonicalize preserves evaluation on randomized terms") {
    // random products of deltas, first-power g factors and pole factors;
    // the canonical form must evaluate identically on each structure
    auto rnd = make_grid(1234, 160, {Symbol::F0, Symbol::F1, Symbol::I0, Symbol::I1}, 0.0, 4.0);
    const LinearForm pool[] = {
        var(Symbol::F0) + var(Symbol::F1) - var(Symbol::I0) - var(Symbol::I1),
        var(Symbol::F0) - var(Symbol::I0),
        var(Symbol::F1) - var(Symbol::I1),
        (var(Symbol::F0) - var(Symbol::I1)).plus_const(complexd{0.75, 0.0}),
        (var(Symbol::I0) - var(Symbol::F1)).plus_const(complexd{-1.25, 0.0}),
        (var(Symbol::F1) + var(Symbol::I0)).plus_const(complexd{2.5, 0.0}),
    };
    for (std::uint64_t trial = 0; trial < 40; ++trial) {
        auto pick = [&](std::uint64_t salt) {
            return pool[(trial * 7 + salt * 13) % std::size(pool)];
        };
        Term t;
        t.prefactor = complexd{0.25 + 0.5 * ((trial * 11) % 5), -0.3 * ((trial * 3) % 4)};
        t.with_delta(pool[0]);
        if (trial % 3 == 0) t.with_delta(pool[1 + trial % 2]);
        t.with_g(pick(1));
        t.with_pole(pick(2).plus_const(complexd{0.0, 1.5}), -1);
        if (trial % 2 == 0) t.with_pole(pick(3).plus_const(complexd{0.0, -0.5}), trial % 4 ? 1 : -1);

        Amplitude raw;
        raw.photons = 2;
        raw.scale = 1.0;
        raw.terms.push_back(t);
        Amplitude can;
        try {
            can = canonicalize(raw);
        } catch (const PinchSingularity&) {
            continue;  // a denominator vanished on the support: skip the draw
        } catch (const IllDefinedDistribution&) {
            continue;
        }
        // the structure present both before and after is the raw term's own
        // support (the g expansion's delta branch adds a new structure that
        // has no pre-image)
        const auto probe = reduce_on_support(t, 1.0);
        REQUIRE(probe.has_value());
        int checked = 0;
        for (const auto& base : rnd) {
            if (checked >= 5) break;
            Assignment pt = base;
            for (const auto& d : probe->deltas) {
                auto lead = d.leading_symbol();
                if (lead) pt.set(*lead, d.solved_for(*lead).evaluate(pt).real());
            }
            complexd vr;
            std::optional<complexd> vc;
            try {
                vr = eval_coefficient(raw, probe->deltas, pt);
                vc = try_eval_coefficient(can, probe->deltas, pt);
            } catch (const OnPoleError&) {
                continue;
            } catch (const ConstraintViolated&) {
                continue;
            }
            if (!vc) continue;  // the principal branch cancelled away entirely
            ++checked;
            const double mag = std::max({std::abs(vr), std::abs(*vc), 1e-300});
            CHECK(std::abs(vr - *vc) <= 1e-12 * mag);
        }
    }
}

TEST_CASE("eval_coefficient on the canonical single-photon amplitude") {
    const double gamma = 2e4;
    const auto sys = EmitterSystem::tls(2e15, gamma);
    const double a = pi * gamma * gamma;
    const Amplitude amp = amp_single_tls(sys, sys.omega + a);  // Delta_i = pi gamma^2
    Assignment pt;
    pt.set(Symbol::F, sys.omega + a);
    const complexd c = eval_coefficient(amp, {var(Symbol::F) - var(Symbol::I)}, pt);
    // (1-i)/(1+i) = -i, up to the absolute-frequency quantization of Delta
    // (ulp(2e15)/pi gamma^2 ~ 1e-10)
    CHECK(std::abs(c - complexd{0.0, -1.0}) < 1e-9);

    // far-detuned limit -> 1
    const Amplitude far = amp_single_tls(sys, sys.omega + 1e12 * a);
    Assignment pf;
    pf.set(Symbol::F, sys.omega + 1e12 * a);
    const complexd cf = eval_coefficient(far, {var(Symbol::F) - var(Symbol::I)}, pf);
    CHECK(std::abs(cf - complexd{1.0, 0.0}) < 1e-10);
}

TEST_CASE("eval_coefficient: mixing coefficient at the symmetric-drive point") {
    const double gamma = 2e4, delta = 1e14, Om = 2e15;
    const auto sys = EmitterSystem::tls(Om, gamma);
    const Amplitude fan = amp_two_tls_fan(sys, Om + delta, Om - delta);
    Assignment pt;
    pt.set(Symbol::F0, Om);
    pt.set(Symbol::F1, Om);
    const complexd c =
        eval_coefficient(fan, {var(Symbol::F0) + var(Symbol::F1) - var(Symbol::I0) - var(Symbol::I1)}, pt);
    const double a = pi * gamma * gamma;  // a^2 = pi^2 gamma^4
    const double expected = -8.0 * gamma * gamma / (a * a + delta * delta);
    CHECK(std::abs(c - complexd{expected, 0.0}) <= 1e-12 * std::abs(expected));
}

TEST_CASE("constraint violation and on-pole errors") {
    const auto sys = EmitterSystem::tls(2e15, 2e4);
    const Amplitude amp = amp_single_tls(sys, 2.1e15);
    Assignment bad;
    bad.set(Symbol::F, 2.05e15);  // does not satisfy delta(f-i)
    CHECK_THROWS_AS((void)eval_coefficient(amp, {var(Symbol::F) - var(Symbol::I)}, bad),
                    ConstraintViolated);
    // on-pole: Delta_i = -i pi gamma^2 unreachable for real input, so force a
    // nearly-resonant g argument through the raw two-photon form instead
    const Amplitude raw = amp_two_tls(sys, 2.1e15, 1.9e15);
    Assignment pole;
    pole.set(Symbol::F0, 2.1e15);  // f0 == i0 pins g(D_i0 - D_f0) at zero
    pole.set(Symbol::F1, 1.9e15);
    CHECK_THROWS_AS((void)eval_coefficient(
                        raw, {var(Symbol::F0) + var(Symbol::F1) - var(Symbol::I0) - var(Symbol::I1)},
                        pole),
                    OnPoleError);
}

TEST_CASE("degenerate drive: coefficients of coinciding structures add") {
    const auto sys = EmitterSystem::tls(2e15, 2e4);
    const double w = 2e15 + 3e13;
    const Amplitude fan = amp_two_tls_fan(sys, w, w);  // i0 == i1
    Assignment pt;
    pt.set(Symbol::F0, w);
    pt.set(Symbol::F1, w);
    // both permutation structures and the mixing structure are satisfied;
    // the total is [2 t(i0)t(i1) + mixing coefficient]
    const complexd total = coefficient_total(fan, pt);
    const complexd tt = t_tls(sys, w) * t_tls(sys, w);
    const complexd mix = eval_coefficient(
        fan, {var(Symbol::F0) + var(Symbol::F1) - var(Symbol::I0) - var(Symbol::I1)}, pt);
    CHECK(std::abs(total - (2.0 * tt + mix)) <= 1e-12 * std::abs(total));
}

TEST_CASE("equal_on_grid: amplitude against itself") {
    const auto sys = EmitterSystem::tls(2e15, 2e4);
    const Amplitude fan = amp_two_tls_fan(sys, 2.1e15, 1.9e15);
    const auto grid = make_grid(5, 25, {Symbol::F1, Symbol::I0, Symbol::I1}, 2e15, 2e14);
    const auto eq = equal_on_grid(fan, fan, grid, 1e-14);
    CHECK(eq.pass);
    CHECK(eq.max_rel_dev == 0.0);
    CHECK(eq.structures_match);
}

TEST_CASE("equal_on_grid reports structural mismatch distinctly") {
    const auto sys = EmitterSystem::tls(2e15, 2e4);
    const Amplitude fan = amp_two_tls_fan(sys, 2.1e15, 1.9e15);
    Amplitude single = amp_single_tls(sys, 2.1e15);
    single.photons = 2;  // same photon count, different structures
    const auto eq = equal_on_grid(fan, single, make_grid(5, 5, {Symbol::F1, Symbol::I0, Symbol::I1},
                                                         2e15, 2e14), 1e-10);
    CHECK_FALSE(eq.pass);
    CHECK_FALSE(eq.structures_match);
    CHECK(!eq.detail.empty());
}

TEST_CASE("exchange symmetry of the canonical two-photon mixing coefficient") {
    const auto sys = EmitterSystem::tls(2e15, 2e4);
    const double i0 = 2e15 + 1.3e14, i1 = 2e15 - 0.7e14;
    const Amplitude can = canonicalize(amp_two_tls(sys, i0, i1));
    std::vector<LinearForm> cons = {var(Symbol::F0) + var(Symbol::F1) - var(Symbol::I0) -
                                    var(Symbol::I1)};
    for (const auto& base : make_grid(23, 20, {Symbol::F0}, 2e15, 2e14)) {
        const double f0 = *base.get(Symbol::F0);
        const double f1 = i0 + i1 - f0;
        Assignment a;
        a.set(Symbol::F0, f0);
        a.set(Symbol::F1, f1);
        a.set(Symbol::I0, i0);
        a.set(Symbol::I1, i1);
        Assignment swapped_i = a;
        swapped_i.set(Symbol::I0, i1);
        swapped_i.set(Symbol::I1, i0);
        Assignment swapped_f = a;
        swapped_f.set(Symbol::F0, f1);
        swapped_f.set(Symbol::F1, f0);
        complexd v, vi, vf;
        try {
            v = eval_coefficient(can, cons, a);
            vi = eval_coefficient(can, cons, swapped_i);
            vf = eval_coefficient(can, cons, swapped_f);
        } catch (const OnPoleError&) {
            continue;
        }
        CHECK(std::abs(v - vi) <= 1e-11 * std::abs(v));
        CHECK(std::abs(v - vf) <= 1e-11 * std::abs(v));
    }
}
