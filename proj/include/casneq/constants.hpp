#pragma once

#include <complex>
#include <memory>
#include <stdexcept>

namespace casneq {

// Unit system: energies in eV (frequencies are stored as hbar*omega, also eV),
// lengths and inverse wavevectors in micrometers, temperatures in kelvin.
// Pressures are eV/um^3 internally and converted to Pa at the API boundary.
struct Constants {
    static constexpr double hbar_c = 0.1973269804;          // eV um
    static constexpr double k_boltzmann = 8.617333262e-5;   // eV / K
    static constexpr double fine_structure = 7.2973525693e-3;
    static constexpr double pa_per_ev_um3 = 0.1602176634;   // (1.602e-19 J) / (1e-18 m^3)
    static constexpr double vf_over_c_default = 1.0 / 300.0;
};

using Complex = std::complex<double>;

inline double pressure_to_pascal(double p_ev_um3) {
    return p_ev_um3 * Constants::pa_per_ev_um3;
}

inline double pascal_to_pressure(double p_pa) {
    return p_pa / Constants::pa_per_ev_um3;
}

// Dirac-cone sheet parameters. `delta` is the full spectral gap (the
// quasiparticle branches start at +-delta/2), `mu` the chemical potential.
struct GrapheneSheet {
    double delta = 0.3;       // eV
    double mu = 0.0;          // eV
    double temperature = 300; // K
    double vf_ratio = Constants::vf_over_c_default;

    void validate() const {
        if (!(delta >= 0.0)) throw std::invalid_argument("sheet: delta must be >= 0");
        if (!(mu >= 0.0)) throw std::invalid_argument("sheet: mu must be >= 0");
        if (!(temperature > 0.0)) throw std::invalid_argument("sheet: temperature must be > 0");
        if (!(vf_ratio > 0.0 && vf_ratio < 1.0)) throw std::invalid_argument("sheet: vf_ratio must be in (0,1)");
    }
};

// Sheet response evaluation: full wavevector dependence, or the k->0 kernels.
enum class ResponseMode { nonlocal, local };

// What each plate is made of.
enum class StackKind { graphene_coated, bare_substrate, const_eps, ideal_mirror };

class PermittivityModel; // material.hpp

struct Scenario {
    double separation = 0.2; // um
    double t_env = 300.0;    // K, environment temperature
    double t_plate1 = 300.0; // K
    double t_plate2 = 300.0; // K
    GrapheneSheet sheet1{};
    GrapheneSheet sheet2{};
    std::shared_ptr<const PermittivityModel> substrate; // required unless const_eps/mirror
    ResponseMode mode = ResponseMode::nonlocal;
    StackKind stack = StackKind::graphene_coated;
    double eps_const = 1.0; // used by StackKind::const_eps

    void validate() const {
        if (!(separation > 0.0)) throw std::invalid_argument("scenario: separation must be > 0");
        if (!(t_env > 0.0 && t_plate1 > 0.0 && t_plate2 > 0.0))
            throw std::invalid_argument("scenario: temperatures must be > 0");
        if (stack == StackKind::graphene_coated) {
            sheet1.validate();
            sheet2.validate();
            if (sheet1.temperature != t_plate1 || sheet2.temperature != t_plate2)
                throw std::invalid_argument("scenario: sheet temperatures must equal plate temperatures");
        }
        if ((stack == StackKind::graphene_coated || stack == StackKind::bare_substrate) && !substrate)
            throw std::invalid_argument("scenario: substrate model required");
        if (stack == StackKind::const_eps && !(eps_const >= 1.0))
            throw std::invalid_argument("scenario: eps_const must be >= 1");
    }
};

} // namespace casneq
