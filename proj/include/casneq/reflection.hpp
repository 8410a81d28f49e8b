#pragma once

#include <memory>

#include "casneq/constants.hpp"
#include "casneq/material.hpp"
#include "casneq/poltensor.hpp"

namespace casneq {

enum class FrequencyAxis { real_freq, imaginary_freq };
enum class Kinematics { propagating, evanescent };

// TM/TE amplitude reflection coefficients of one plate at one kinematic
// point. Imaginary-axis pairs are real (stored with zero imaginary part);
// real-axis propagating pairs share the phase convention of vacuum_q, so
// exp(-2 q a) is the round-trip factor on both axes and both kinematics.
struct ReflectionPair {
    Complex r_tm{};
    Complex r_te{};
    FrequencyAxis axis = FrequencyAxis::imaginary_freq;
    Kinematics kinematics = Kinematics::evanescent;
};

// Numerator/denominator factorization of one plate's coefficients at one
// kinematic point: r_tm = n_tm / d_tm, r_te = n_te / d_te, with a common
// smooth scale (k^2) divided out. Both parts stay smooth through coupled
// surface-mode resonances, where the ratio itself has a near-pole at a zero
// of the denominator; callers integrating through such resonances can work
// with the parts directly instead of the ratio.
struct ReflectionParts {
    Complex n_tm{};
    Complex d_tm{};
    Complex n_te{};
    Complex d_te{};
};

// Vacuum-side transverse wavenumber (k^2 - w^2/(hbar c)^2)^(1/2), 1/um:
// positive real for evanescent waves (hbar c k > w), -i|.| for propagating
// ones, so exp(-2 q a) decays resp. oscillates as exp(+i phase).
Complex vacuum_q(double omega_ev, double k_um);

// Substrate-side root (k^2 - eps w^2/(hbar c)^2)^(1/2) with the branch cut
// approached from below: passive media (Im eps >= 0) land in the fourth
// quadrant, decaying into the half-space with an outgoing phase.
Complex substrate_q(double omega_ev, double k_um, Complex eps);

// Sheet-dressed coefficients at real frequency (hbar*omega in eV, > 0;
// k >= 0 in 1/um). The sheet temperature rides in `sheet`.
ReflectionPair reflect_real_axis(double omega_ev, double k_um,
                                 const GrapheneSheet& sheet,
                                 const PermittivityModel& substrate,
                                 ResponseMode mode,
                                 const QuadratureConfig& cfg = {});

// Same on the imaginary axis (hbar*xi in eV, >= 0; k > 0). Both
// coefficients are real with |r| <= 1.
ReflectionPair reflect_imag_axis(double xi_ev, double k_um,
                                 const GrapheneSheet& sheet,
                                 const PermittivityModel& substrate,
                                 ResponseMode mode,
                                 const QuadratureConfig& cfg = {});

// One plate's reflection response with the stack composition fixed at
// construction. Pure and re-entrant; copies share the substrate model.
class PlateResponse {
  public:
    static PlateResponse graphene(GrapheneSheet sheet,
                                  std::shared_ptr<const PermittivityModel> substrate,
                                  ResponseMode mode = ResponseMode::nonlocal);
    static PlateResponse bare(std::shared_ptr<const PermittivityModel> substrate);
    static PlateResponse fresnel(double eps_const); // sheet-free, constant eps
    static PlateResponse mirror();                  // r_tm = 1, r_te = -1
    // Plate 1 or 2 of a validated scenario.
    static PlateResponse from_scenario(const Scenario& scn, int plate);

    ReflectionPair real_axis(double omega_ev, double k_um,
                             const QuadratureConfig& cfg = {}) const;
    ReflectionParts real_axis_parts(double omega_ev, double k_um,
                                    const QuadratureConfig& cfg = {}) const;
    ReflectionPair imag_axis(double xi_ev, double k_um,
                             const QuadratureConfig& cfg = {}) const;

    StackKind kind() const { return kind_; }
    const GrapheneSheet& sheet() const { return sheet_; }
    ResponseMode mode() const { return mode_; }

    // True when the two plates are guaranteed to return identical pairs at
    // every kinematic point (used to skip duplicate evaluations).
    bool equivalent_to(const PlateResponse& other) const;

  private:
    PlateResponse() = default;

    StackKind kind_ = StackKind::ideal_mirror;
    GrapheneSheet sheet_{};
    std::shared_ptr<const PermittivityModel> substrate_;
    ResponseMode mode_ = ResponseMode::nonlocal;
    double eps_const_ = 1.0;
};

} // namespace casneq
