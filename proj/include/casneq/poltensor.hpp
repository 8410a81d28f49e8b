#pragma once

#include "casneq/constants.hpp"
#include "casneq/quadrature.hpp"

namespace casneq {

// Kinematic region of a tensor evaluation. On the real frequency axis the
// response is purely real below the pair-creation threshold (gapped_real),
// complex above it (dissipative), and complex with intraband damping when the
// phase velocity drops below the sheet Fermi velocity (subluminal). Imaginary
// axis points are real by construction.
enum class TensorRegime { gapped_real, dissipative, subluminal, imaginary_axis };

// Density-density component and transverse contraction of the sheet
// polarization tensor, both divided by hbar: pi00 in 1/um, pi in 1/um^3.
struct PolTensorPoint {
    Complex pi00{};
    Complex pi{};
    TensorRegime regime = TensorRegime::imaginary_axis;
};

// Shape functions of the vacuum (zero-weight) part of the tensor.
// gap_shape(z) = 1 - (z + 1/z) atanh(z) on [0,1), series-guarded near 0.
double gap_shape(double z);
// phi1(delta, hcp): real vacuum term for 0 < hcp < delta (below threshold).
double phi1(double delta, double hcp);
// phi2(delta, hcp): complex continuation for hcp >= delta (above threshold);
// also covers delta = 0. Im phi2 < 0.
Complex phi2(double delta, double hcp);
// psi_shape(x) = 2[x + (1-x^2) atan(1/x)], psi(0) = pi; series for large x.
double psi_shape(double x);

// Thermal occupation factor summed over both carrier signs,
// sigma(b*u + m) + sigma(b*u - m) with sigma(y) = 1/(e^y + 1); m = |mu|/kT.
// Bounded by 1 for u >= 0, monotone decreasing, underflow-safe.
double fermi_weight(double u, double b, double mu_over_kt);

// Real-axis kinematic bundle. Exactly one of {p, q_tilde} is positive away
// from the light-like line omega = v_F k; the boundary itself is resolved to
// the subluminal side with a 1e-12 relative offset, and the pair-creation
// threshold hcp = delta to the dissipative side likewise.
struct RealAxisAux {
    TensorRegime regime = TensorRegime::gapped_real;
    double p = 0.0;           // (omega^2 - v_F^2 k^2)^(1/2)/c, 1/um (timelike)
    double q_tilde = 0.0;     // (v_F^2 k^2 - omega^2)^(1/2)/c, 1/um (subluminal)
    double gamma_tilde = 0.0; // omega/(c q_tilde), subluminal only
    double big_a = 0.0;       // 1 - delta^2/(hc p)^2, timelike only
    double d_tilde = 0.0;     // delta/(hc p)
    double big_d = 0.0;       // delta/(hc q_tilde)
    double b_tilde = 0.0;     // hc p/(2 kT)
    double big_b = 0.0;       // hc q_tilde/(2 kT)
    double u1 = 0.0, u2 = 0.0; // interband window endpoints (dissipative)
    double w_eff = 0.0;       // boundary-nudged hbar*omega actually used, eV
    double cap_k = 0.0;       // hbar v_F k, eV
    double hcp = 0.0;         // hc p resp. hc q_tilde, eV
};

RealAxisAux real_axis_aux(double omega_ev, double k_um, const GrapheneSheet& sheet);

// k->0 kernels: pi00 -> k^2 * k00, pi -> k^2 * ktr. On the real axis the pair
// ktr = -(omega/hc)^2 * k00 holds identically; on the imaginary axis
// ktr = +(xi/hc)^2 * k00 and both are positive.
struct LocalKernels {
    Complex k00; // um
    Complex ktr; // 1/um
    bool dissipative = false;
};
struct LocalKernelsImag {
    double k00 = 0.0; // um
    double ktr = 0.0; // 1/um
};

LocalKernels local_kernels_real_axis(double omega_ev, const GrapheneSheet& sheet,
                                     const QuadratureConfig& cfg = {});
// Requires xi > 0: the charge kernel diverges thermally at xi -> 0.
LocalKernelsImag local_kernels_imag_axis(double xi_ev, const GrapheneSheet& sheet,
                                         const QuadratureConfig& cfg = {});
// Finite xi->0 limit of the transverse kernel (the zero-frequency TE channel
// of the local description).
double local_te_kernel_zero_freq(const GrapheneSheet& sheet,
                                 const QuadratureConfig& cfg = {});

// Crossover of the nonlocal evaluation to the k->0 kernels, as the ratio of
// v_F k to the frequency. Public so that integrators sweeping k at fixed
// frequency can place a breakpoint on the seam.
inline constexpr double local_crossover_ratio = 1e-3;

// Tensor at real frequency omega (given as hbar*omega in eV) and wavevector k
// (1/um). Local mode evaluates the k->0 kernels times the true k^2; nonlocal
// mode falls back to the same kernels once v_F k <= local_crossover_ratio *
// omega, where the direct u-integrals lose all significance to cancellation.
PolTensorPoint pi_components_real_axis(double omega_ev, double k_um,
                                       const GrapheneSheet& sheet, ResponseMode mode,
                                       const QuadratureConfig& cfg = {});

// Tensor on the imaginary axis (xi >= 0 as hbar*xi in eV; xi = k = 0 is a
// domain error). Output is real and nonnegative in both components; a residual
// imaginary part beyond 1e-10 relative signals a branch defect and throws.
// Local mode requires xi > 0 (see local_kernels_imag_axis).
PolTensorPoint pi_components_imag_axis(double xi_ev, double k_um,
                                       const GrapheneSheet& sheet, ResponseMode mode,
                                       const QuadratureConfig& cfg = {});

} // namespace casneq
