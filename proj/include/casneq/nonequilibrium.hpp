#pragma once

#include "casneq/reflection.hpp"

namespace casneq {

// Bose occupation of a cavity mode with dimensionless frequency v = 2 a w/c
// at temperature t_kelvin: 1 / (exp(hbar c v / (2 a k_B T)) - 1).
double occupation(double v, double a_um, double t_kelvin);

// Multiple-reflection denominator 1 - r1 r2 phase(v, t): an oscillatory
// round-trip phase exp(i v sqrt(1-t^2)) for t < 1, a real decay
// exp(-v sqrt(t^2-1)) for t > 1.
Complex d_alpha(double v, double t, Complex r1, Complex r2);

// Pointwise factors of the thermal-imbalance integrand at (v, t), exposed
// for tests and diagnostics. The numerators are the sector-appropriate
// combinations: |r2|^2 - |r1|^2 when propagating, Im r1 Re r2 - Re r1 Im r2
// when evanescent.
struct NeqIntegrandParts {
    double occupation_diff = 0.0;
    Complex r1_tm, r2_tm, r1_te, r2_te;
    double d2_tm = 0.0, d2_te = 0.0; // |D_alpha|^2
    double numerator_tm = 0.0, numerator_te = 0.0;
    Kinematics sector = Kinematics::propagating;
};

NeqIntegrandParts neq_integrand_parts(const Scenario& scn, double v, double t,
                                      const QuadratureConfig& qcfg = {});

// Thermal-imbalance pressure correction and its sector split (eV/um^3).
// total = propagating + evanescent exactly; error sums the quadrature
// error estimates of both sectors.
struct NeqBreakdown {
    double total = 0.0;
    double propagating = 0.0;
    double evanescent = 0.0;
    double error = 0.0;
};

// The correction itself: outer v-integral of the occupation difference
// against both polarizations' propagating and evanescent kernels, with the
// coefficients taken on the real frequency axis at w = c v/(2a),
// k = v t/(2a). Identically zero when both plate temperatures coincide.
NeqBreakdown delta_p_neq(const Scenario& scn, const QuadratureConfig& qcfg = {});

} // namespace casneq
