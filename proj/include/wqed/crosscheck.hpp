#ifndef WQED_CROSSCHECK_HPP
#define WQED_CROSSCHECK_HPP

#include "wqed/distamp.hpp"
#include "wqed/model.hpp"

namespace wqed {

struct CheckReport {
    std::string check;
    int points = 0;
    double max_rel_dev = 0.0;
    bool pass = false;
    std::string detail;
};

std::string report_json(const CheckReport& rep);

/// Canonicalized raw two-photon TLS amplitude against the closed Fan form
/// on random off-pole assignments.
CheckReport fan_equivalence(const EmitterSystem& sys, int grid_size, std::uint64_t seed);

/// Bound-state coefficient of the two-photon Lambda T-matrix in the
/// propagator transcription: sum over photon permutations and intermediate
/// levels of
///   (i / 2 pi g_mu g_nu) g_lam^2 / (k_s + dt_nu - p_s' - dt_lam)
///   * (2 pi i g_mu g_nu)^2 / ((D_{p_s'^1, mu} + iG)(D_{k_s, nu} + iG)).
/// k0,k1 are the input and p0,p1 the output frequencies; overall energy
/// conservation (including the ground-level shift) is assumed.
complexd pg_bound_coefficient(const EmitterSystem& sys, int mu, int nu, double k0, double k1,
                              double p0, double p1);

/// Both T-matrix blocks (bound-state and individually-energy-preserving)
/// against the canonical two-photon Lambda amplitude minus its
/// frequency-preserving block, structure by structure on random grids.
CheckReport pg_equivalence(const EmitterSystem& sys, int grid_size, std::uint64_t seed);

/// |t| = 1 and the Lambda single-photon unitarity row sums over random
/// detunings.
CheckReport unitarity_check(const EmitterSystem& sys, int points, std::uint64_t seed);

}  // namespace wqed

#endif
