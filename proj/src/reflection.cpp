#include "casneq/reflection.hpp"

#include <cmath>
#include <stdexcept>

namespace casneq {

namespace {

// Principal square root with real negative radicands resolved to -i|.|^(1/2)
// (cut approached from below), matching the propagating branch of vacuum_q.
Complex lower_sqrt(Complex z) {
    if (z.imag() == 0.0) z = Complex(z.real(), -0.0);
    return std::sqrt(z);
}

// The dressed TM/TE ratio from explicit kinematic roots and sheet response.
// All inputs hbar-scaled: pi00 in 1/um, pi in 1/um^3; every term is 1/um^3.
ReflectionPair dressed(double k, Complex q, Complex qe, Complex eps,
                       Complex pi00, Complex pi) {
    const double k2 = k * k;
    ReflectionPair out;
    out.r_tm = (k2 * (eps * q - qe) + q * qe * pi00) /
               (k2 * (eps * q + qe) + q * qe * pi00);
    out.r_te = (k2 * (q - qe) - pi) / (k2 * (q + qe) + pi);
    return out;
}

// k = 0 limit of the dressed ratio: every term carries k^2, which divides
// out against the k->0 kernels (pi00 = k^2 k00, pi = k^2 ktr).
ReflectionPair dressed_k0(Complex q, Complex qe, Complex eps,
                          Complex k00, Complex ktr) {
    ReflectionPair out;
    out.r_tm = (eps * q - qe + q * qe * k00) / (eps * q + qe + q * qe * k00);
    out.r_te = (q - qe - ktr) / (q + qe + ktr);
    return out;
}

// Parts of the dressed ratio with k^2 divided out of every term, so the
// same expression covers k = 0 (where k00 = pi00/k^2, ktr = pi/k^2 stay
// finite) and the sheet-free case (k00 = ktr = 0).
ReflectionParts dressed_parts(Complex q, Complex qe, Complex eps,
                              Complex k00, Complex ktr) {
    const Complex charge = q * qe * k00;
    ReflectionParts out;
    out.n_tm = eps * q - qe + charge;
    out.d_tm = eps * q + qe + charge;
    out.n_te = q - qe - ktr;
    out.d_te = q + qe + ktr;
    return out;
}

// Sheet-free pair, valid down to k = 0 on both axes.
ReflectionPair bare_pair(Complex q, Complex qe, Complex eps) {
    ReflectionPair out;
    out.r_tm = (eps * q - qe) / (eps * q + qe);
    out.r_te = (q - qe) / (q + qe);
    return out;
}

Kinematics real_axis_kinematics(double w, double k) {
    return k * Constants::hbar_c < w ? Kinematics::propagating
                                     : Kinematics::evanescent;
}

double imag_axis_q(double xi, double k) {
    return std::hypot(k, xi / Constants::hbar_c);
}

void check_real_axis_args(double w, double k, const char* who) {
    if (!(w > 0.0))
        throw std::invalid_argument(std::string(who) + ": omega must be > 0");
    if (!(k >= 0.0))
        throw std::invalid_argument(std::string(who) + ": k must be >= 0");
}

void check_imag_axis_args(double xi, double k, const char* who) {
    if (!(xi >= 0.0))
        throw std::invalid_argument(std::string(who) + ": xi must be >= 0");
    if (!(k > 0.0))
        throw std::invalid_argument(std::string(who) + ": k must be > 0");
}

} // namespace

Complex vacuum_q(double omega_ev, double k_um) {
    const double woc = omega_ev / Constants::hbar_c;
    if (k_um >= woc) return Complex(std::sqrt((k_um - woc) * (k_um + woc)), 0.0);
    return Complex(0.0, -std::sqrt((woc - k_um) * (woc + k_um)));
}

Complex substrate_q(double omega_ev, double k_um, Complex eps) {
    const double woc2 = omega_ev / Constants::hbar_c * (omega_ev / Constants::hbar_c);
    return lower_sqrt(Complex(k_um * k_um - eps.real() * woc2, -eps.imag() * woc2));
}

ReflectionPair reflect_real_axis(double omega_ev, double k_um,
                                 const GrapheneSheet& sheet,
                                 const PermittivityModel& substrate,
                                 ResponseMode mode, const QuadratureConfig& cfg) {
    check_real_axis_args(omega_ev, k_um, "reflect_real_axis");
    const Complex eps = substrate.eps_real_axis(omega_ev);
    const Complex q = vacuum_q(omega_ev, k_um);
    const Complex qe = substrate_q(omega_ev, k_um, eps);
    ReflectionPair out;
    if (k_um == 0.0) {
        const LocalKernels loc = local_kernels_real_axis(omega_ev, sheet, cfg);
        out = dressed_k0(q, qe, eps, loc.k00, loc.ktr);
    } else {
        const PolTensorPoint pt =
            pi_components_real_axis(omega_ev, k_um, sheet, mode, cfg);
        out = dressed(k_um, q, qe, eps, pt.pi00, pt.pi);
    }
    out.axis = FrequencyAxis::real_freq;
    out.kinematics = real_axis_kinematics(omega_ev, k_um);
    return out;
}

ReflectionPair reflect_imag_axis(double xi_ev, double k_um,
                                 const GrapheneSheet& sheet,
                                 const PermittivityModel& substrate,
                                 ResponseMode mode, const QuadratureConfig& cfg) {
    check_imag_axis_args(xi_ev, k_um, "reflect_imag_axis");
    const double eps = substrate.eps_imag_axis(xi_ev);
    const double xoc = xi_ev / Constants::hbar_c;
    const double q = imag_axis_q(xi_ev, k_um);
    const double qe = std::sqrt(k_um * k_um + eps * xoc * xoc);
    ReflectionPair out;
    if (mode == ResponseMode::local && xi_ev == 0.0) {
        // The local charge kernel diverges thermally at xi -> 0, saturating
        // the TM channel at unity; the transverse kernel limit stays finite.
        const double ktr0 = local_te_kernel_zero_freq(sheet, cfg);
        out.r_tm = 1.0;
        out.r_te = -ktr0 / (2.0 * k_um + ktr0);
    } else {
        const PolTensorPoint pt =
            pi_components_imag_axis(xi_ev, k_um, sheet, mode, cfg);
        out = dressed(k_um, Complex(q), Complex(qe), Complex(eps),
                      Complex(pt.pi00.real()), Complex(pt.pi.real()));
    }
    out.axis = FrequencyAxis::imaginary_freq;
    out.kinematics = Kinematics::evanescent;
    return out;
}

PlateResponse PlateResponse::graphene(GrapheneSheet sheet,
                                      std::shared_ptr<const PermittivityModel> substrate,
                                      ResponseMode mode) {
    sheet.validate();
    if (!substrate)
        throw std::invalid_argument("PlateResponse: substrate model required");
    PlateResponse p;
    p.kind_ = StackKind::graphene_coated;
    p.sheet_ = sheet;
    p.substrate_ = std::move(substrate);
    p.mode_ = mode;
    return p;
}

PlateResponse PlateResponse::bare(std::shared_ptr<const PermittivityModel> substrate) {
    if (!substrate)
        throw std::invalid_argument("PlateResponse: substrate model required");
    PlateResponse p;
    p.kind_ = StackKind::bare_substrate;
    p.substrate_ = std::move(substrate);
    return p;
}

PlateResponse PlateResponse::fresnel(double eps_const) {
    if (!(eps_const >= 1.0))
        throw std::invalid_argument("PlateResponse: eps_const must be >= 1");
    PlateResponse p;
    p.kind_ = StackKind::const_eps;
    p.eps_const_ = eps_const;
    return p;
}

PlateResponse PlateResponse::mirror() { return PlateResponse(); }

PlateResponse PlateResponse::from_scenario(const Scenario& scn, int plate) {
    if (plate != 1 && plate != 2)
        throw std::invalid_argument("PlateResponse: plate index must be 1 or 2");
    const GrapheneSheet& sheet = plate == 1 ? scn.sheet1 : scn.sheet2;
    switch (scn.stack) {
        case StackKind::graphene_coated:
            return graphene(sheet, scn.substrate, scn.mode);
        case StackKind::bare_substrate:
            return bare(scn.substrate);
        case StackKind::const_eps:
            return fresnel(scn.eps_const);
        case StackKind::ideal_mirror:
            return mirror();
    }
    throw std::logic_error("PlateResponse: unknown stack kind");
}

bool PlateResponse::equivalent_to(const PlateResponse& other) const {
    if (kind_ != other.kind_) return false;
    switch (kind_) {
        case StackKind::ideal_mirror:
            return true;
        case StackKind::const_eps:
            return eps_const_ == other.eps_const_;
        case StackKind::bare_substrate:
            return substrate_ == other.substrate_;
        case StackKind::graphene_coated:
            return substrate_ == other.substrate_ && mode_ == other.mode_ &&
                   sheet_.delta == other.sheet_.delta &&
                   sheet_.mu == other.sheet_.mu &&
                   sheet_.temperature == other.sheet_.temperature &&
                   sheet_.vf_ratio == other.sheet_.vf_ratio;
    }
    return false;
}

ReflectionPair PlateResponse::real_axis(double omega_ev, double k_um,
                                        const QuadratureConfig& cfg) const {
    check_real_axis_args(omega_ev, k_um, "PlateResponse::real_axis");
    ReflectionPair out;
    switch (kind_) {
        case StackKind::graphene_coated:
            return reflect_real_axis(omega_ev, k_um, sheet_, *substrate_, mode_, cfg);
        case StackKind::bare_substrate: {
            const Complex eps = substrate_->eps_real_axis(omega_ev);
            out = bare_pair(vacuum_q(omega_ev, k_um),
                            substrate_q(omega_ev, k_um, eps), eps);
            break;
        }
        case StackKind::const_eps: {
            const Complex eps(eps_const_, 0.0);
            out = bare_pair(vacuum_q(omega_ev, k_um),
                            substrate_q(omega_ev, k_um, eps), eps);
            break;
        }
        case StackKind::ideal_mirror:
            out.r_tm = 1.0;
            out.r_te = -1.0;
            break;
    }
    out.axis = FrequencyAxis::real_freq;
    out.kinematics = real_axis_kinematics(omega_ev, k_um);
    return out;
}

ReflectionParts PlateResponse::real_axis_parts(double omega_ev, double k_um,
                                               const QuadratureConfig& cfg) const {
    check_real_axis_args(omega_ev, k_um, "PlateResponse::real_axis_parts");
    if (kind_ == StackKind::ideal_mirror)
        return ReflectionParts{1.0, 1.0, -1.0, 1.0};
    const Complex eps = kind_ == StackKind::const_eps
                            ? Complex(eps_const_, 0.0)
                            : substrate_->eps_real_axis(omega_ev);
    const Complex q = vacuum_q(omega_ev, k_um);
    const Complex qe = substrate_q(omega_ev, k_um, eps);
    if (kind_ != StackKind::graphene_coated)
        return dressed_parts(q, qe, eps, 0.0, 0.0);
    if (k_um == 0.0) {
        const LocalKernels loc = local_kernels_real_axis(omega_ev, sheet_, cfg);
        return dressed_parts(q, qe, eps, loc.k00, loc.ktr);
    }
    const double k2 = k_um * k_um;
    const PolTensorPoint pt =
        pi_components_real_axis(omega_ev, k_um, sheet_, mode_, cfg);
    return dressed_parts(q, qe, eps, pt.pi00 / k2, pt.pi / k2);
}

ReflectionPair PlateResponse::imag_axis(double xi_ev, double k_um,
                                        const QuadratureConfig& cfg) const {
    check_imag_axis_args(xi_ev, k_um, "PlateResponse::imag_axis");
    ReflectionPair out;
    switch (kind_) {
        case StackKind::graphene_coated:
            return reflect_imag_axis(xi_ev, k_um, sheet_, *substrate_, mode_, cfg);
        case StackKind::bare_substrate:
        case StackKind::const_eps: {
            const double eps = kind_ == StackKind::const_eps
                                   ? eps_const_
                                   : substrate_->eps_imag_axis(xi_ev);
            const double xoc = xi_ev / Constants::hbar_c;
            const double qe = std::sqrt(k_um * k_um + eps * xoc * xoc);
            out = bare_pair(Complex(imag_axis_q(xi_ev, k_um)), Complex(qe),
                            Complex(eps));
            break;
        }
        case StackKind::ideal_mirror:
            out.r_tm = 1.0;
            out.r_te = -1.0;
            break;
    }
    out.axis = FrequencyAxis::imaginary_freq;
    out.kinematics = Kinematics::evanescent;
    return out;
}

} // namespace casneq
