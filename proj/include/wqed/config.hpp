#ifndef WQED_CONFIG_HPP
#define WQED_CONFIG_HPP

#include <string>

#include "wqed/distamp.hpp"
#include "wqed/model.hpp"

namespace wqed {

/// Run configuration read from a JSON file. Schema:
///   kind           "tls" | "lambda"
///   omega          excited-level frequency [rad/s]
///   gamma1         coupling [(rad/s)^1/2]; the TLS coupling
///   gamma2         second coupling (lambda; optional, default 0)
///   dtilde1/2      ground-level offsets [rad/s] (lambda; optional)
///   omega0         waveguide central frequency (optional, traceability only)
///   inputs         [w] or [w0, w1], absolute rad/s
///   initial_ground 1 | 2 (lambda; default 1)
struct RunConfig {
    EmitterSystem system;
    PhotonConfig photons;
    int initial_ground = 1;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

RunConfig load_config(const std::string& path);
RunConfig parse_config(const std::string& json_text);

/// Amplitude serialization: terms as delta strings, g/pole factors with
/// powers, complex prefactors as [re, im].
std::string amplitude_json(const Amplitude& amp);

}  // namespace wqed

#endif
