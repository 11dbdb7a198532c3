#include <doctest.h>

#include "wqed/closedform.hpp"
#include "wqed/model.hpp"

using namespace wqed;

TEST_CASE("detuning matches the transition offsets") {
    const auto tls = EmitterSystem::tls(2e15, 2e4);
    CHECK(detuning(tls, std::nullopt, 2e15) == 0.0);
    CHECK(detuning(tls, std::nullopt, 2.1e15) == doctest::Approx(1e14).epsilon(1e-15));

    const auto lam = EmitterSystem::lambda(2e15, 2e4, 2e4, 0.0, 2e14);
    CHECK(detuning(lam, GroundLabel(2), 1.8e15) == 0.0);
    CHECK(detuning(lam, std::nullopt, 2e15) == 0.0);  // bare
}

TEST_CASE("detuning is linear in omega") {
    const auto lam = EmitterSystem::lambda(2e15, 2e4, 1e4, -3e13, 2e14);
    const double x = 7.25e13;
    for (int lvl = 1; lvl <= 2; ++lvl) {
        const double a = detuning(lam, GroundLabel(lvl), 1.9e15 + x);
        const double b = detuning(lam, GroundLabel(lvl), 1.9e15);
        CHECK(a - b == x);
    }
}

TEST_CASE("validate_system reports invariant violations") {
    CHECK(validate_system(EmitterSystem::tls(2e15, 2e4)).pass());
    CHECK_FALSE(validate_system(EmitterSystem::tls(2e15, 0.0)).pass());

    auto bad_order = EmitterSystem::lambda(2e15, 2e4, 2e4, 3e14, 2e14);
    auto rep = validate_system(bad_order);
    REQUIRE_FALSE(rep.pass());
    CHECK(rep.violations.front().find("ordering") != std::string::npos);

    CHECK(validate_system(EmitterSystem::lambda(2e15, 2e4, 1.4e4, 0.0, 2e14)).pass());
    // equal offsets admitted as the degenerate case
    CHECK(validate_system(EmitterSystem::lambda(2e15, 2e4, 2e4, 1e14, 1e14)).pass());
}

TEST_CASE("invalid ground level for the system kind") {
    const auto tls = EmitterSystem::tls(2e15, 2e4);
    CHECK_THROWS_AS((void)detuning(tls, GroundLabel(2), 2e15), std::invalid_argument);
}

TEST_CASE("photon config validation") {
    const auto tls = EmitterSystem::tls(2e15, 2e4);
    PhotonConfig ok{{2.1e15, 1.9e15}, {}};
    CHECK(validate_photons(tls, ok).pass());
    PhotonConfig none{{}, {}};
    CHECK_FALSE(validate_photons(tls, none).pass());
    PhotonConfig neg{{-1.0}, {}};
    CHECK_FALSE(validate_photons(tls, neg).pass());
}

TEST_CASE("omega0 never enters any amplitude") {
    const auto a = EmitterSystem::tls(2e15, 2e4, 0.0);
    const auto b = EmitterSystem::tls(2e15, 2e4, 5e15);  // wildly shifted omega0
    const double i0 = 2.1e15, i1 = 1.9e15;
    const Amplitude fa = amp_two_tls_fan(a, i0, i1);
    const Amplitude fb = amp_two_tls_fan(b, i0, i1);
    const auto grid = make_grid(11, 20, {Symbol::F1, Symbol::I0, Symbol::I1}, 2e15, 2e14);
    const auto eq = equal_on_grid(fa, fb, grid, 1e-12);
    CHECK(eq.pass);
    CHECK(eq.max_rel_dev == 0.0);  // omega0 is not even read
}
