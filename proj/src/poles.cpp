#include "wqed/poles.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "wqed/closedform.hpp"

#include <json.hpp>

namespace wqed {

namespace {

constexpr double kMergeTol = 1e-6;    // * Gamma, duplicate-merge window
constexpr double kResidueTol = 1e-9;  // relative residue-cancellation cutoff

complexd ipow(complexd z, int p) {
    complexd out{1.0, 0.0};
    const complexd base = p >= 0 ? z : complexd{1.0, 0.0} / z;
    for (int k = 0; k < std::abs(p); ++k) out *= base;
    return out;
}

struct Candidate {
    complexd z;
    complexd residue;
    int sector = 0;
    int order = 1;
    std::string origin;
};

// linear form in f0 only (after f1 elimination and input binding):
// returns {slope a (real), offset b} with value = a*f0 + b
struct LinF0 {
    double a = 0.0;
    complexd b{0.0, 0.0};
};

LinF0 project_to_f0(const LinearForm& form, const LinearForm& f1_solved, const Assignment& inputs) {
    LinearForm g = form.substituted(Symbol::F1, f1_solved);
    LinF0 out;
    out.a = g.coeff(Symbol::F0).value();
    LinearForm rest = g;
    rest.set_coeff(Symbol::F0, Rational(0));
    out.b = rest.evaluate(inputs);
    return out;
}

}  // namespace

const char* pole_class_name(PoleClass c) {
    switch (c) {
        case PoleClass::StatePreserving: return "state-preserving";
        case PoleClass::StateChanging: return "state-changing";
        case PoleClass::Common: return "common";
    }
    return "?";
}

PoleMap extract_poles(const Amplitude& amp, int nu, const Assignment& inputs_in) {
    if (!amp.canonical)
        throw std::invalid_argument("extract_poles: canonicalize the amplitude first");
    if (amp.photons != 2)
        throw std::invalid_argument("extract_poles: two-photon amplitude required");
    PoleMap map;
    map.nu = nu;
    const Assignment inputs = inputs_in.merged_onto(amp.bound);
    const double G = amp.scale;

    std::vector<Candidate> cands;
    for (const Term& t : amp.terms) {
        if (t.deltas.empty())
            throw std::invalid_argument("extract_poles: term lacking a conservation delta");
        if (t.deltas.size() != 1) continue;  // frequency-preserving term: no free f0
        const LinearForm& cons = t.deltas.front();
        if (!cons.has_symbol(Symbol::F0) || !cons.has_symbol(Symbol::F1))
            throw std::invalid_argument(
                "extract_poles: mixing term lacks a conservation delta relating f1 to f0: " +
                cons.str());
        if (!t.gfactors.empty())
            throw std::invalid_argument("extract_poles: unexpanded g factor in canonical term");
        const LinearForm f1_solved = cons.solved_for(Symbol::F1);

        // project every denominator onto f0 and collect zeros
        struct Proj {
            LinF0 lin;
            int power;
        };
        std::vector<Proj> projs;
        projs.reserve(t.polefactors.size());
        for (const auto& p : t.polefactors)
            projs.push_back({project_to_f0(p.form, f1_solved, inputs), p.power});

        for (std::size_t v = 0; v < projs.size(); ++v) {
            if (t.polefactors[v].power >= 0) continue;
            const LinF0& lv = projs[v].lin;
            if (lv.a == 0.0) continue;  // no f0 dependence
            const complexd z = -lv.b / lv.a;
            if (projs[v].power < -1) {
                // repeated linear factor: order |power| pole, kept without a
                // cancellation test (the closed forms never produce one)
                cands.push_back({z, complexd{1.0, 0.0}, t.final_ground, -projs[v].power, t.origin});
                continue;
            }
            // residue of a simple pole: prefactor / a * prod of the other factors at z
            complexd res = t.prefactor / lv.a;
            int gamma_power = 0;  // the vanishing factor leaves no net scale power
            bool higher_order = false;
            for (std::size_t w = 0; w < projs.size(); ++w) {
                if (w == v) continue;
                const complexd val = (projs[w].lin.a * z + projs[w].lin.b) / G;
                if (std::abs(val) < kEpsPole && projs[w].power < 0) {
                    higher_order = true;
                    break;
                }
                res *= ipow(val, projs[w].power);
                gamma_power += projs[w].power;
            }
            if (higher_order) {
                // coincident denominators: report as a higher-order pole without
                // the cancellation test (cannot arise from the closed forms)
                cands.push_back({z, complexd{1.0, 0.0}, t.final_ground, 2, t.origin});
                continue;
            }
            res *= std::pow(G, gamma_power);
            cands.push_back({z, res, t.final_ground, 1, t.origin});
        }
    }

    // cluster per sector and location
    struct Cluster {
        complexd z;
        complexd res_sum{0.0, 0.0};
        double res_mag = 0.0;
        int sector = 0;
        int order = 1;
        std::string origin;
    };
    std::vector<Cluster> clusters;
    const double merge = kMergeTol * G;
    for (const auto& c : cands) {
        bool placed = false;
        for (auto& cl : clusters) {
            if (cl.sector == c.sector && std::abs(cl.z - c.z) <= merge) {
                cl.res_sum += c.residue;
                cl.res_mag += std::abs(c.residue);
                cl.order = std::max(cl.order, c.order);
                placed = true;
                break;
            }
        }
        if (!placed) clusters.push_back({c.z, c.residue, std::abs(c.residue), c.sector, c.order,
                                         c.origin});
    }

    // drop removable locations (summed residue cancels), then conjugate-close
    struct SectorPole {
        complexd z;
        int sector;
        int order;
        std::string origin;
    };
    std::vector<SectorPole> kept;
    for (const auto& cl : clusters) {
        if (cl.order == 1 && std::abs(cl.res_sum) <= kResidueTol * cl.res_mag) continue;
        kept.push_back({cl.z, cl.sector, cl.order, cl.origin});
    }
    const std::size_t direct = kept.size();
    for (std::size_t k = 0; k < direct; ++k) {
        if (std::abs(kept[k].z.imag()) <= merge) continue;
        const complexd conj = std::conj(kept[k].z);
        bool present = false;
        for (std::size_t j = 0; j < kept.size(); ++j)
            if (kept[j].sector == kept[k].sector && std::abs(kept[j].z - conj) <= merge)
                present = true;
        if (!present) kept.push_back({conj, kept[k].sector, kept[k].order, "conj:" + kept[k].origin});
    }

    // classify across sectors
    struct Entry {
        complexd z;
        int order;
        bool in_nu = false, in_other = false;
        std::string origin;
    };
    std::vector<Entry> entries;
    for (const auto& sp : kept) {
        const bool is_nu = sp.sector == nu || sp.sector == 0;
        bool placed = false;
        for (auto& e : entries) {
            if (std::abs(e.z - sp.z) <= merge) {
                e.in_nu |= is_nu;
                e.in_other |= !is_nu;
                e.order = std::max(e.order, sp.order);
                placed = true;
                break;
            }
        }
        if (!placed)
            entries.push_back({sp.z, sp.order, is_nu, !is_nu, sp.origin});
    }
    for (const auto& e : entries) {
        Pole p;
        p.location = e.z;
        p.order = e.order;
        p.origin = e.origin;
        p.cls = e.in_nu && e.in_other ? PoleClass::Common
                : e.in_nu            ? PoleClass::StatePreserving
                                     : PoleClass::StateChanging;
        map.poles.push_back(std::move(p));
    }
    std::sort(map.poles.begin(), map.poles.end(), [](const Pole& a, const Pole& b) {
        if (a.location.real() != b.location.real()) return a.location.real() < b.location.real();
        return a.location.imag() < b.location.imag();
    });
    return map;
}

PoleMap pole_map(const EmitterSystem& sys, int nu, double i0, double i1) {
    require_valid(sys);
    Amplitude amp = sys.kind == EmitterKind::TLS
                        ? amp_two_tls_fan(sys, i0, i1)
                        : canonicalize(amp_two_lambda(sys, nu, i0, i1));
    PoleMap map = extract_poles(amp, sys.kind == EmitterKind::TLS ? 0 : nu);
    map.system = sys;
    map.i0 = i0;
    map.i1 = i1;
    map.nu = nu;
    return map;
}

void write_pole_csv(std::ostream& os, const PoleMap& map) {
    os << "re_f,im_f,order,class,origin\n";
    os << std::setprecision(17);
    for (const auto& p : map.poles)
        os << p.location.real() << "," << p.location.imag() << "," << p.order << ","
           << pole_class_name(p.cls) << "," << p.origin << "\n";
}

std::string pole_map_json(const PoleMap& map) {
    nlohmann::json j;
    j["system"]["kind"] = map.system.kind == EmitterKind::TLS ? "tls" : "lambda";
    j["system"]["omega"] = map.system.omega;
    j["system"]["gamma1"] = map.system.gamma1;
    j["system"]["gamma2"] = map.system.gamma2;
    j["system"]["dtilde1"] = map.system.dtilde1;
    j["system"]["dtilde2"] = map.system.dtilde2;
    j["drive"]["i0"] = map.i0;
    j["drive"]["i1"] = map.i1;
    j["drive"]["initial_ground"] = map.nu;
    j["poles"] = nlohmann::json::array();
    for (const auto& p : map.poles) {
        nlohmann::json jp;
        jp["re"] = p.location.real();
        jp["im"] = p.location.imag();
        jp["order"] = p.order;
        jp["class"] = pole_class_name(p.cls);
        jp["origin"] = p.origin;
        j["poles"].push_back(jp);
    }
    return j.dump(2);
}

std::vector<SpectrumPoint> mixing_spectrum(const EmitterSystem& sys, int nu, int mu, double i0,
                                           double i1, const std::vector<double>& fgrid) {
    require_valid(sys);
    if (fgrid.empty()) throw std::invalid_argument("mixing_spectrum: empty frequency grid");
    const bool tls = sys.kind == EmitterKind::TLS;
    Amplitude amp = tls ? amp_two_tls_fan(sys, i0, i1)
                        : canonicalize(amp_two_lambda(sys, nu, i0, i1));
    const int sector = tls ? 0 : mu;
    const double G = sys.gamma_scale();

    PoleMap pm = extract_poles(amp, tls ? 0 : nu);
    std::vector<double> real_poles;
    for (const auto& p : pm.poles)
        if (std::abs(p.location.imag()) <= kMergeTol * G) real_poles.push_back(p.location.real());

    // conservation: f0 + f1 = i0 + i1 + dt_nu - dt_mu
    const double shift = tls ? 0.0 : sys.dtilde(nu) - sys.dtilde(mu);
    const double etot = i0 + i1 + shift;

    std::vector<LinearForm> consset;
    {
        LinearForm cons = LinearForm::variable(Symbol::F0) + LinearForm::variable(Symbol::F1) -
                          LinearForm::variable(Symbol::I0) - LinearForm::variable(Symbol::I1);
        consset.push_back(cons.plus_const(complexd{-shift, 0.0}));
    }

    std::vector<SpectrumPoint> out;
    out.reserve(fgrid.size());
    for (double f : fgrid) {
        SpectrumPoint pt;
        pt.f = f;
        bool flagged = false;
        for (double rp : real_poles)
            if (std::abs(f - rp) <= kEpsPole * G || std::abs((etot - f) - rp) <= kEpsPole * G)
                flagged = true;
        if (flagged) {
            pt.at_resonance = true;
            out.push_back(pt);
            continue;
        }
        Assignment a;
        a.set(Symbol::F0, f);
        a.set(Symbol::F1, etot - f);
        const auto c = try_eval_coefficient(amp, consset, a, tls ? std::optional<int>() : sector);
        const double m = c ? std::abs(*c) : 0.0;
        pt.abs2 = m * m;
        out.push_back(pt);
    }
    return out;
}

}  // namespace wqed
