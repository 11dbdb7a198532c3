#ifndef WQED_MODEL_HPP
#define WQED_MODEL_HPP

#include <optional>
#include <string>
#include <vector>

namespace wqed {

enum class EmitterKind { TLS, Lambda };

/// Waveguide-coupled emitter parameters. Angular frequencies in rad/s,
/// coupling amplitudes in (rad/s)^(1/2). For a two-level system only
/// gamma1 is used. For a Lambda system the two ground levels sit at
/// dtilde1 / dtilde2 above the zero-energy reference and the excited
/// level at omega above it; the ordering omega > dtilde2 >= dtilde1 is
/// enforced by validate() (equal offsets are the degenerate case).
struct EmitterSystem {
    EmitterKind kind = EmitterKind::TLS;
    double omega = 0.0;     // excited level above the zero reference
    double gamma1 = 0.0;    // coupling to |g1> (or the TLS coupling)
    double gamma2 = 0.0;    // coupling to |g2> (Lambda only)
    double dtilde1 = 0.0;   // |g1> offset above the zero reference
    double dtilde2 = 0.0;   // |g2> offset above the zero reference
    double omega0 = 0.0;    // waveguide central frequency; cancels everywhere,
                            // retained for traceability only

    static EmitterSystem tls(double omega, double gamma, double omega0 = 0.0);
    static EmitterSystem lambda(double omega, double gamma1, double gamma2,
                                double dtilde1, double dtilde2,
                                double omega0 = 0.0);

    /// Sum of squared couplings (gamma1^2 + gamma2^2; gamma^2 for TLS).
    double coupling_sq() const;
    /// Natural frequency scale Gamma = pi * coupling_sq(). All internal
    /// detuning arithmetic is nondimensionalized by this.
    double gamma_scale() const;

    double dtilde(int level) const;  // level in {1,2}; 0 for TLS level 1
    double gamma_of(int level) const;
};

/// Ground-level selector mu in {1,2}; for a TLS only 1 is valid.
struct GroundLabel {
    int index = 1;
    explicit GroundLabel(int idx = 1) : index(idx) {}
};

/// Input (and optionally fixed output) photon frequencies, absolute rad/s.
struct PhotonConfig {
    std::vector<double> inputs;   // length 1 or 2
    std::vector<double> outputs;  // empty or same length as inputs
};

struct ValidationReport {
    std::vector<std::string> violations;
    bool pass() const { return violations.empty(); }
};

ValidationReport validate_system(const EmitterSystem& sys);
ValidationReport validate_photons(const EmitterSystem& sys, const PhotonConfig& ph);

/// Detuning of a photon of absolute frequency omega from the emitter
/// transition: omega - Omega for the TLS / bare case, omega - Omega + dtilde_l
/// for Lambda branch l. `level` empty means bare.
double detuning(const EmitterSystem& sys, std::optional<GroundLabel> level, double omega);

void require_valid(const EmitterSystem& sys);

}  // namespace wqed

#endif
