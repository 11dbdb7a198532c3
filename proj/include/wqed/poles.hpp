#ifndef WQED_POLES_HPP
#define WQED_POLES_HPP

#include <iosfwd>

#include "wqed/distamp.hpp"
#include "wqed/model.hpp"

namespace wqed {

enum class PoleClass { StatePreserving, StateChanging, Common };
const char* pole_class_name(PoleClass c);

struct Pole {
    complexd location{0.0, 0.0};  // complex f0 [rad/s]
    int order = 1;
    PoleClass cls = PoleClass::StatePreserving;
    std::string origin;
};

struct PoleMap {
    std::vector<Pole> poles;
    EmitterSystem system;
    double i0 = 0.0, i1 = 0.0;
    int nu = 1;
};

/// Analytic pole extraction from a canonical two-photon amplitude in the
/// complex plane of f0, with f1 eliminated through each term's conservation
/// delta. Every denominator is linear in f0, so zeros are exact. Locations
/// are merged within 1e-6*Gamma; locations whose summed residue cancels
/// across terms are dropped (they are removable). Off-axis poles are
/// reported together with their complex conjugates: the resonance lines of
/// the scattered spectrum come in conjugate pairs, and the map lists both
/// members (origin "conj:" marks the mirrored entry).
///
/// Classification is per final-ground sector of the originating terms:
/// sector nu only -> state-preserving, other sector only -> state-changing,
/// both -> common. TLS amplitudes count as the state-preserving sector.
PoleMap extract_poles(const Amplitude& amp, int nu, const Assignment& inputs = {});

/// Convenience driver: builds the canonical two-photon amplitude for the
/// system (Fan form for a TLS), extracts and classifies.
PoleMap pole_map(const EmitterSystem& sys, int nu, double i0, double i1);

void write_pole_csv(std::ostream& os, const PoleMap& map);
std::string pole_map_json(const PoleMap& map);

}  // namespace wqed

#endif
