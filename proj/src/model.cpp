#include "wqed/model.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace wqed {

EmitterSystem EmitterSystem::tls(double omega, double gamma, double omega0) {
    EmitterSystem s;
    s.kind = EmitterKind::TLS;
    s.omega = omega;
    s.gamma1 = gamma;
    s.omega0 = omega0;
    return s;
}

EmitterSystem EmitterSystem::lambda(double omega, double gamma1, double gamma2,
                                    double dtilde1, double dtilde2, double omega0) {
    EmitterSystem s;
    s.kind = EmitterKind::Lambda;
    s.omega = omega;
    s.gamma1 = gamma1;
    s.gamma2 = gamma2;
    s.dtilde1 = dtilde1;
    s.dtilde2 = dtilde2;
    s.omega0 = omega0;
    return s;
}

double EmitterSystem::coupling_sq() const {
    if (kind == EmitterKind::TLS) return gamma1 * gamma1;
    return gamma1 * gamma1 + gamma2 * gamma2;
}

double EmitterSystem::gamma_scale() const {
    return std::numbers::pi * coupling_sq();
}

double EmitterSystem::dtilde(int level) const {
    if (kind == EmitterKind::TLS) {
        if (level != 1) throw std::invalid_argument("TLS has no ground level " + std::to_string(level));
        return 0.0;
    }
    if (level == 1) return dtilde1;
    if (level == 2) return dtilde2;
    throw std::invalid_argument("ground level index must be 1 or 2");
}

double EmitterSystem::gamma_of(int level) const {
    if (kind == EmitterKind::TLS) {
        if (level != 1) throw std::invalid_argument("TLS has no ground level " + std::to_string(level));
        return gamma1;
    }
    if (level == 1) return gamma1;
    if (level == 2) return gamma2;
    throw std::invalid_argument("ground level index must be 1 or 2");
}

ValidationReport validate_system(const EmitterSystem& sys) {
    ValidationReport rep;
    if (!(sys.gamma1 >= 0.0) || !(sys.gamma2 >= 0.0))
        rep.violations.push_back("coupling amplitudes must be non-negative");
    if (sys.coupling_sq() <= 0.0)
        rep.violations.push_back("no coupling: at least one gamma must be positive");
    if (!std::isfinite(sys.omega) || sys.omega <= 0.0)
        rep.violations.push_back("omega must be finite and positive");
    if (sys.kind == EmitterKind::Lambda) {
        if (!(sys.dtilde2 >= sys.dtilde1))
            rep.violations.push_back("ground level ordering violated: dtilde2 >= dtilde1 required");
        if (!(sys.omega > sys.dtilde2))
            rep.violations.push_back("excited level must lie above both ground levels: omega > dtilde2 required");
    }
    return rep;
}

ValidationReport validate_photons(const EmitterSystem& sys, const PhotonConfig& ph) {
    ValidationReport rep = validate_system(sys);
    if (ph.inputs.empty() || ph.inputs.size() > 2)
        rep.violations.push_back("need 1 or 2 input photon frequencies");
    for (double w : ph.inputs)
        if (!std::isfinite(w) || w <= 0.0)
            rep.violations.push_back("photon frequencies must be finite and positive");
    if (!ph.outputs.empty() && ph.outputs.size() != ph.inputs.size())
        rep.violations.push_back("outputs, when fixed, must match the input count");
    for (double w : ph.outputs)
        if (!std::isfinite(w))
            rep.violations.push_back("output frequencies must be finite");
    return rep;
}

double detuning(const EmitterSystem& sys, std::optional<GroundLabel> level, double omega) {
    if (!std::isfinite(omega)) throw std::invalid_argument("detuning: omega must be finite");
    if (!level) return omega - sys.omega;
    return omega - sys.omega + sys.dtilde(level->index);
}

void require_valid(const EmitterSystem& sys) {
    auto rep = validate_system(sys);
    if (!rep.pass()) {
        std::string msg = "invalid emitter system:";
        for (const auto& v : rep.violations) msg += " " + v + ";";
        throw std::invalid_argument(msg);
    }
}

}  // namespace wqed
