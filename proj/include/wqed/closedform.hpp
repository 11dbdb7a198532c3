#ifndef WQED_CLOSEDFORM_HPP
#define WQED_CLOSEDFORM_HPP

#include "wqed/distamp.hpp"
#include "wqed/model.hpp"

namespace wqed {

/// Branch detuning as a symbolic form: sym - Omega + dtilde_level
/// (level 0 = bare / TLS).
LinearForm detuning_form(const EmitterSystem& sys, Symbol sym, int level = 0);

/// TLS single-photon transmission t(i) = (D - i pi g^2)/(D + i pi g^2),
/// D the detuning of the input photon. Unit modulus for real D.
complexd t_tls(const EmitterSystem& sys, double i_freq);
complexd t_tls_of_detuning(const EmitterSystem& sys, double Delta);

/// Lambda single-photon scattering kernel
/// s_{mu nu}(D) = -2 i pi gamma_mu gamma_nu / (D + i pi (gamma1^2+gamma2^2)).
complexd s_lambda(const EmitterSystem& sys, int mu, int nu, double Delta);

/// Single-photon amplitudes. Output symbol f, input symbol i; the numeric
/// input frequency is bound as the default assignment.
Amplitude amp_single_tls(const EmitterSystem& sys, double i_freq);
Amplitude amp_single_lambda(const EmitterSystem& sys, int nu, double i_freq);

/// Two-photon TLS amplitude in the raw printed form: the non-mixing part
/// with coefficient [t(i0)+t(i1)-1] on both permutation delta structures
/// (three product terms per structure) plus the four-fold mixing sum, each
/// mixing term keeping its g(D_i - D_f) factor unexpanded. Not canonical.
Amplitude amp_two_tls(const EmitterSystem& sys, double i0, double i1);

/// Canonical closed two-photon TLS amplitude: t(i0)t(i1) on the permutation
/// structures and the single-delta bound-state term
/// 4 pi i g^4 / ((D_f0+ia)(D_f1+ia)) * (1/(D_i0+ia) + 1/(D_i1+ia)).
Amplitude amp_two_tls_fan(const EmitterSystem& sys, double i0, double i1);

/// Two-photon Lambda amplitude, both final-ground sectors tagged on the
/// terms, in the raw three-block form (frequency-preserving block,
/// double-delta block, single-conservation-delta block). Not canonical.
Amplitude amp_two_lambda(const EmitterSystem& sys, int nu, double i0, double i1);

struct SpectrumPoint {
    double f = 0.0;
    double abs2 = 0.0;
    bool at_resonance = false;
};

/// |mixing coefficient|^2 at f0 = f with f1 fixed by the sector's
/// conservation delta. Points within the pole guard of a genuine real pole
/// of the sector are flagged instead of evaluated.
std::vector<SpectrumPoint> mixing_spectrum(const EmitterSystem& sys, int nu, int mu, double i0,
                                           double i1, const std::vector<double>& fgrid);

}  // namespace wqed

#endif
