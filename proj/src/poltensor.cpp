#include "casneq/poltensor.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace casneq {
namespace {

constexpr double kHc = Constants::hbar_c;
constexpr double kAlpha = Constants::fine_structure;
constexpr double kPi = std::numbers::pi;
// Relative offset resolving the regime boundaries (light-like line, pair
// threshold) to their owning side.
constexpr double kEdgeNudge = 1e-12;
// Occupation e-foldings beyond which the u-integral tails are dropped.
constexpr double kTailExponent = 40.0;
// Below v_F k = local_crossover_ratio * frequency the direct u-integrals are
// pure cancellation against their own leading order; the k^2 kernels take
// over there (switch error ~1e-6 relative, below quadrature tolerance).
constexpr double kLocalCrossover = local_crossover_ratio;

using Vec2 = ComplexVec<2>;

double sigmoid(double y) {
    if (y >= 0.0) {
        const double e = std::exp(-y);
        return e / (1.0 + e);
    }
    return 1.0 / (1.0 + std::exp(y));
}

double sigmoid_deriv(double y) { // d/dy [1/(e^y + 1)]
    const double s = sigmoid(y);
    return -s * (1.0 - s);
}

struct Accum {
    Vec2 value{};
    double error = 0.0;
};

template <class F>
void acc_plain(Accum& acc, F&& f, double lo, double hi, const QuadratureConfig& cfg) {
    if (!(hi > lo)) return;
    auto r = integrate_finite(f, lo, hi, cfg);
    acc.value += r.value;
    acc.error += r.error;
}

template <class F>
void acc_plain_split(Accum& acc, F&& f, double lo, double hi, std::vector<double> cuts,
                     const QuadratureConfig& cfg) {
    if (!(hi > lo)) return;
    std::sort(cuts.begin(), cuts.end());
    double cur = lo;
    for (double c : cuts) {
        if (c > cur && c < hi) {
            acc_plain(acc, f, cur, c, cfg);
            cur = c;
        }
    }
    acc_plain(acc, f, cur, hi, cfg);
}

// Inverse-square-root endpoint map (distance to endpoint = s^2) that hands the
// integrand its exact distance, so vanishing radicand factors are formed from
// s^2 directly instead of a catastrophically cancelling subtraction.
template <class G>
void acc_sqrt_map(Accum& acc, G&& core, double lo, double hi, SingularEnd end,
                  const QuadratureConfig& cfg) {
    if (!(hi > lo)) return;
    const double smax = std::sqrt(hi - lo);
    auto f = [&core, lo, hi, end](double s) -> Vec2 {
        const double d = s * s;
        const double u =
            (end == SingularEnd::lower) ? std::min(lo + d, hi) : std::max(hi - d, lo);
        return (2.0 * s) * core(u, d);
    };
    auto r = integrate_finite(f, 0.0, smax, cfg);
    acc.value += r.value;
    acc.error += r.error;
}

// Clip point of the occupation-weighted u-integrals: past it the weight is
// under 2e-40 of its scale. Nudged across any nearby radicand zero so a
// clipped endpoint never sits inside a singular neighborhood.
double tail_clip(double d_start, double b, double m, std::initializer_list<double> roots) {
    double u_max = d_start + (kTailExponent + m) / b;
    for (double v : roots)
        if (std::abs(u_max - v) <= 0.05 * v) u_max = 1.05 * v;
    return u_max;
}

PolTensorPoint eval_timelike(const RealAxisAux& aux, double k, const GrapheneSheet& sheet,
                             const QuadratureConfig& cfg) {
    const double w = aux.w_eff;
    const double hcp = aux.hcp;
    const double kk = aux.cap_k;
    const double kt = Constants::k_boltzmann * sheet.temperature;
    const double m = std::abs(sheet.mu) / kt;
    const bool gapped = aux.regime == TensorRegime::gapped_real;
    const Complex phi =
        gapped ? Complex(phi1(sheet.delta, hcp), 0.0) : phi2(sheet.delta, hcp);

    const double kd = kk * aux.d_tilde; // K * delta / (hc p)
    const double inv2p = 0.5 / hcp;
    const double tr_scale = hcp / (2.0 * w * w);
    auto weight = [b = aux.b_tilde, m](double u) { return fermi_weight(u, b, m); };
    auto num1 = [kk](double x) { return (x - kk) * (x + kk); };
    auto num2 = [kd](double x) { return x * x + kd * kd; };

    Accum acc;
    if (gapped) {
        const double nega = kk * kk * (-aux.big_a); // K^2 |A| > 0, radicands never vanish
        auto f = [&](double u) -> Vec2 {
            const double xp = hcp * u + w, xm = hcp * u - w;
            const double sp = std::sqrt(xp * xp + nega);
            const double sm = std::sqrt(xm * xm + nega);
            const double c1 = num1(xp) / sp - num1(xm) / sm;
            const double c2 = num2(xp) / sp - num2(xm) / sm;
            const double wt = weight(u);
            Vec2 out;
            out[0] = Complex(wt * (1.0 - inv2p * c1), 0.0);
            out[1] = Complex(wt * (1.0 - tr_scale * c2), 0.0);
            return out;
        };
        const double u_max = tail_clip(aux.d_tilde, aux.b_tilde, m, {});
        // the minus-branch numerator dips on the scale sqrt(nega) around its
        // zero crossing; hand the integrator that neighborhood explicitly
        const double u_dip = w / hcp;
        const double half_dip = std::sqrt(nega) / hcp;
        acc_plain_split(acc, f, aux.d_tilde, u_max,
                        {u_dip - 5.0 * half_dip, u_dip, u_dip + 5.0 * half_dip}, cfg);
    } else {
        const double u1 = aux.u1, u2 = aux.u2;
        const double gap = u2 - u1;
        const double u_max = tail_clip(aux.d_tilde, aux.b_tilde, m, {u1, u2});
        // radm = |(u - u1)(u - u2)|, the minus-branch radicand over hcp^2.
        // comb: 0 = both-branch sum (below the window), 1 = interband window
        // (minus-branch root continued to -i sqrt), 2 = tail difference.
        auto core = [&](double u, double radm, int comb) -> Vec2 {
            const double xp = hcp * u + w, xm = hcp * u - w;
            const double sp = hcp * std::sqrt((u + u1) * (u + u2));
            const double sm = hcp * std::sqrt(radm);
            const double fp1 = num1(xp) / sp, fm1 = num1(xm) / sm;
            const double fp2 = num2(xp) / sp, fm2 = num2(xm) / sm;
            Complex c1, c2;
            if (comb == 0) {
                c1 = fp1 + fm1;
                c2 = fp2 + fm2;
            } else if (comb == 1) {
                c1 = Complex(fp1, -fm1);
                c2 = Complex(fp2, -fm2);
            } else {
                c1 = fp1 - fm1;
                c2 = fp2 - fm2;
            }
            const double wt = weight(u);
            Vec2 out;
            out[0] = wt * (Complex(1.0, 0.0) - inv2p * c1);
            out[1] = wt * (Complex(1.0, 0.0) - tr_scale * c2);
            return out;
        };
        if (u1 <= u_max) {
            acc_sqrt_map(
                acc, [&](double u, double d) { return core(u, d * (gap + d), 0); },
                aux.d_tilde, u1, SingularEnd::upper, cfg);
            if (u2 <= u_max) {
                const double mid = 0.5 * (u1 + u2);
                acc_sqrt_map(
                    acc, [&](double u, double d) { return core(u, d * (gap - d), 1); },
                    u1, mid, SingularEnd::lower, cfg);
                acc_sqrt_map(
                    acc, [&](double u, double d) { return core(u, (gap - d) * d, 1); },
                    mid, u2, SingularEnd::upper, cfg);
                const double lift = std::min(u_max, 2.0 * u2 + 1.0);
                acc_sqrt_map(
                    acc, [&](double u, double d) { return core(u, (gap + d) * d, 2); },
                    u2, lift, SingularEnd::lower, cfg);
                acc_plain(
                    acc, [&](double u) { return core(u, (u - u1) * (u - u2), 2); },
                    lift, u_max, cfg);
            } else {
                acc_sqrt_map(
                    acc, [&](double u, double d) { return core(u, d * (gap - d), 1); },
                    u1, u_max, SingularEnd::lower, cfg);
            }
        } else {
            acc_plain(acc, [&](double u) { return core(u, (u1 - u) * (u2 - u), 0); },
                      aux.d_tilde, u_max, cfg);
        }
    }

    const double rf2 = sheet.vf_ratio * sheet.vf_ratio;
    PolTensorPoint out;
    out.regime = aux.regime;
    out.pi00 = -(2.0 * kAlpha * k * k * kHc / (hcp * hcp)) * phi +
               (4.0 * kAlpha * hcp / (rf2 * kHc)) * acc.value[0];
    out.pi = (2.0 * kAlpha * k * k / kHc) * phi +
             (4.0 * kAlpha * hcp * w * w / (rf2 * kHc * kHc * kHc)) * acc.value[1];
    return out;
}

PolTensorPoint eval_subluminal(const RealAxisAux& aux, double k, const GrapheneSheet& sheet,
                               const QuadratureConfig& cfg) {
    const double w = aux.w_eff;
    const double hcq = aux.hcp;
    const double kk = aux.cap_k;
    const double gt = aux.gamma_tilde;
    const double bd = aux.big_d;
    const double kt = Constants::k_boltzmann * sheet.temperature;
    const double m = std::abs(sheet.mu) / kt;

    // roots of the two radicands: r_+ = (u_hi - u)(u + u_lo),
    // r_- = (u_lo - u)(u + u_hi), u_hi - u_lo = 2 gamma_tilde
    const double s_base = std::sqrt((1.0 + gt * gt) * (1.0 + bd * bd));
    const double u_hi = s_base + gt;
    const double u_lo = (1.0 + bd * bd * (1.0 + gt * gt)) / u_hi;
    const double kd = kk * bd;
    const double tt = gt + std::sqrt(1.0 + gt * gt); // numerator root base
    auto weight = [b = aux.big_b, m](double u) { return fermi_weight(u, b, m); };
    auto np = [tt](double u) { return (tt - u) * (u + 1.0 / tt); };
    auto nm = [tt](double u) { return (1.0 / tt - u) * (u + tt); };
    auto mp = [w, hcq, kd](double u) {
        const double a = hcq * u;
        return (w - a - kd) * (w - a + kd);
    };
    auto mm = [w, hcq, kd](double u) {
        const double a = hcq * u;
        return (w + a - kd) * (w + a + kd);
    };

    // Below u_m the minus-branch term keeps its principal root and subtracts;
    // above u_m that root continues through the zero of (w + hcq u)^2 - (kd)^2
    // with the opposite sign, so the terms add. u_m sits strictly below u_lo
    // for every parameter set, and drops out entirely (u_m < big_d) in the
    // static corner, where the all-sum form reproduces the zero-frequency
    // screening values.
    const double u_m = (kd - w) / hcq;
    const double u_max = tail_clip(bd, aux.big_b, m, {u_m, u_lo, u_hi});
    const double w2 = w * w;

    // comb: 0 = both radicands positive, above the sign flip (terms add),
    // 3 = both positive, below the flip (principal-root difference),
    // 1 = minus radicand negative (+i sqrt continuation), 2 = both negative.
    auto core = [&](double u, double rp_mag, double rm_mag, int comb) -> Vec2 {
        const double srp = std::sqrt(rp_mag), srm = std::sqrt(rm_mag);
        const double f1p = np(u) / srp, f1m = nm(u) / srm;
        const double f2p = mp(u) / srp, f2m = mm(u) / srm;
        Complex c1, c2;
        if (comb == 0) {
            c1 = f1p + f1m;
            c2 = f2p + f2m;
        } else if (comb == 3) {
            c1 = f1p - f1m;
            c2 = f2p - f2m;
        } else if (comb == 1) {
            c1 = Complex(f1p, f1m);
            c2 = Complex(f2p, f2m);
        } else {
            c1 = Complex(0.0, -(f1p - f1m));
            c2 = Complex(0.0, -(f2p - f2m));
        }
        const double wt = weight(u);
        Vec2 out;
        out[0] = wt * (Complex(1.0, 0.0) - 0.5 * c1);
        out[1] = wt * (Complex(w2, 0.0) - 0.5 * c2);
        return out;
    };

    Accum acc;
    const double dif_hi = std::clamp(u_m, bd, std::min(u_lo, u_max));
    if (dif_hi > bd) {
        // radicands stay of order (kk/hcq)^2 on this side, no endpoint map needed
        acc_plain(
            acc,
            [&](double u) {
                return core(u, (u_hi - u) * (u + u_lo), (u_lo - u) * (u + u_hi), 3);
            },
            bd, dif_hi, cfg);
    }
    if (u_lo <= u_max) {
        acc_sqrt_map(
            acc,
            [&](double u, double d) {
                return core(u, (2.0 * gt + d) * (u + u_lo), d * (u + u_hi), 0);
            },
            dif_hi, u_lo, SingularEnd::upper, cfg);
        if (u_hi <= u_max) {
            const double mid = 0.5 * (u_lo + u_hi);
            acc_sqrt_map(
                acc,
                [&](double u, double d) {
                    return core(u, (2.0 * gt - d) * (u + u_lo), d * (u + u_hi), 1);
                },
                u_lo, mid, SingularEnd::lower, cfg);
            acc_sqrt_map(
                acc,
                [&](double u, double d) {
                    return core(u, d * (u + u_lo), (2.0 * gt - d) * (u + u_hi), 1);
                },
                mid, u_hi, SingularEnd::upper, cfg);
            const double lift = std::min(u_max, 2.0 * u_hi + 1.0);
            acc_sqrt_map(
                acc,
                [&](double u, double d) {
                    return core(u, d * (u + u_lo), (2.0 * gt + d) * (u + u_hi), 2);
                },
                u_hi, lift, SingularEnd::lower, cfg);
            acc_plain(
                acc,
                [&](double u) {
                    return core(u, (u - u_hi) * (u + u_lo), (u - u_lo) * (u + u_hi), 2);
                },
                lift, u_max, cfg);
        } else {
            acc_sqrt_map(
                acc,
                [&](double u, double d) {
                    return core(u, (2.0 * gt - d) * (u + u_lo), d * (u + u_hi), 1);
                },
                u_lo, u_max, SingularEnd::lower, cfg);
        }
    } else {
        acc_plain(
            acc,
            [&](double u) {
                return core(u, (u_hi - u) * (u + u_lo), (u_lo - u) * (u + u_hi), 0);
            },
            dif_hi, u_max, cfg);
    }

    const double rf2 = sheet.vf_ratio * sheet.vf_ratio;
    const double psi_d = psi_shape(bd);
    PolTensorPoint out;
    out.regime = TensorRegime::subluminal;
    out.pi00 = Complex(kAlpha * k * k * kHc * psi_d / hcq, 0.0) +
               (4.0 * kAlpha * hcq / (rf2 * kHc)) * acc.value[0];
    out.pi = Complex(kAlpha * k * k * psi_d * hcq / kHc, 0.0) +
             (4.0 * kAlpha * hcq / (rf2 * kHc * kHc * kHc)) * acc.value[1];
    return out;
}

PolTensorPoint eval_imag(double xi, double k, const GrapheneSheet& sheet,
                         const QuadratureConfig& cfg) {
    const double kk = sheet.vf_ratio * kHc * k;
    const double hcq = std::hypot(kk, xi);
    const double g = xi / hcq;
    const double bd = sheet.delta / hcq;
    const double kt = Constants::k_boltzmann * sheet.temperature;
    const double m = std::abs(sheet.mu) / kt;
    const double bb = hcq / (2.0 * kt);
    const double kd = kk * bd;
    const double omg = (kk * kk / (hcq * hcq)) / (1.0 + g); // 1 - g, stably
    const double ur2 = 1.0 + (bd * omg) * (bd * (1.0 + g)); // 1 + D^2 (1 - g^2)
    const double ur = std::sqrt(ur2);
    auto weight = [bb, m](double u) { return fermi_weight(u, bb, m); };

    Accum acc;
    if (xi == 0.0) {
        // purely real radicand with a genuine square-root zero at ur > D;
        // above it both brackets collapse to {1, 0} exactly
        const double u_max = tail_clip(bd, bb, m, {ur});
        auto low = [&](double u, double rmag) -> Vec2 {
            const double sr = std::sqrt(rmag);
            const double wt = weight(u);
            Vec2 out;
            out[0] = Complex(wt * (1.0 - (1.0 - u) * (1.0 + u) / sr), 0.0);
            out[1] = Complex(wt * (-kk * kk * (u - bd) * (u + bd) / sr), 0.0);
            return out;
        };
        if (ur <= u_max) {
            acc_sqrt_map(acc, [&](double u, double d) { return low(u, d * (u + ur)); },
                         bd, ur, SingularEnd::upper, cfg);
            auto tail = [&](double u) -> Vec2 {
                Vec2 out;
                out[0] = Complex(weight(u), 0.0);
                return out;
            };
            acc_plain(acc, tail, ur, u_max, cfg);
        } else {
            acc_plain(acc, [&](double u) { return low(u, (ur - u) * (ur + u)); }, bd,
                      u_max, cfg);
        }
    } else {
        double u_max = bd + (kTailExponent + m) / bb;
        const bool sharp = g < 0.3 && ur > bd;
        if (sharp && u_max > ur * (0.95 - 3.0 * g) && u_max < ur * (1.05 + 3.0 * g))
            u_max = ur * (1.05 + 3.0 * g);
        auto f = [&](double u) -> Vec2 {
            const Complex sr =
                std::sqrt(Complex((ur - u) * (ur + u), 2.0 * g * u));
            const Complex npv((1.0 - u) * (1.0 + u), 2.0 * g * u);
            const double a = hcq * u;
            const Complex mpv = Complex(-(a + kd), xi) * Complex(kd - a, xi);
            const double wt = weight(u);
            Vec2 out;
            out[0] = Complex(wt * (1.0 - std::real(npv / sr)), 0.0);
            out[1] = Complex(wt * (-xi * xi - std::real(mpv / sr)), 0.0);
            return out;
        };
        std::vector<double> cuts;
        if (ur > bd) cuts = {ur * (1.0 - 3.0 * g), ur, ur * (1.0 + 3.0 * g)};
        acc_plain_split(acc, f, bd, u_max, cuts, cfg);
    }

    const double rf2 = sheet.vf_ratio * sheet.vf_ratio;
    const double psi_d = psi_shape(bd);
    const double first00 = kAlpha * k * k * kHc * psi_d / hcq;
    const double first_pi = kAlpha * k * k * psi_d * hcq / kHc;
    const double pref00 = 4.0 * kAlpha * hcq / (rf2 * kHc);
    const double pref_pi = 4.0 * kAlpha * hcq / (rf2 * kHc * kHc * kHc);
    double p00 = first00 + pref00 * std::real(acc.value[0]);
    double ppi = first_pi + pref_pi * std::real(acc.value[1]);
    const double scale00 =
        first00 + pref00 * (std::abs(std::real(acc.value[0])) + acc.error);
    const double scale_pi =
        first_pi + pref_pi * (std::abs(std::real(acc.value[1])) + acc.error);
    // brackets are assembled manifestly real; a residual imaginary part can
    // only signal a defective root combination
    if (pref00 * std::abs(std::imag(acc.value[0])) > 1e-10 * scale00 ||
        pref_pi * std::abs(std::imag(acc.value[1])) > 1e-10 * scale_pi)
        throw std::logic_error("pi_components_imag_axis: residual imaginary part");
    if (p00 < 0.0) {
        if (p00 < -(1e-8 * scale00 + 1e-300))
            throw std::logic_error("pi_components_imag_axis: charge component negative");
        p00 = 0.0;
    }
    if (ppi < 0.0) {
        if (ppi < -(1e-8 * scale_pi + 1e-300))
            throw std::logic_error("pi_components_imag_axis: transverse component negative");
        ppi = 0.0;
    }
    PolTensorPoint out;
    out.regime = TensorRegime::imaginary_axis;
    out.pi00 = Complex(p00, 0.0);
    out.pi = Complex(ppi, 0.0);
    return out;
}

} // namespace

double gap_shape(double z) {
    if (!(z >= 0.0 && z < 1.0)) throw std::domain_error("gap_shape: need 0 <= z < 1");
    if (z < 0.1) {
        // series form of 1 - (z + 1/z) atanh z, avoiding the 1 - 1 cancellation
        double sum = 0.0;
        const double z2 = z * z;
        double zp = z2;
        for (int n = 0; n < 12; ++n) {
            const double term = 4.0 * (n + 1) / double((2 * n + 1) * (2 * n + 3)) * zp;
            sum -= term;
            zp *= z2;
            if (term < 1e-18 * std::abs(sum)) break;
        }
        return sum;
    }
    return 1.0 - (z + 1.0 / z) * std::atanh(z);
}

double phi1(double delta, double hcp) {
    if (!(delta > 0.0) || !(hcp > 0.0) || !(hcp < delta))
        throw std::domain_error("phi1: requires 0 < hcp < delta");
    return delta * gap_shape(hcp / delta);
}

Complex phi2(double delta, double hcp) {
    if (!(hcp > 0.0) || !(delta >= 0.0) || !(hcp >= delta))
        throw std::domain_error("phi2: requires hcp >= delta >= 0 with hcp > 0");
    const double y = delta / hcp;
    const double coeff = hcp * (1.0 + y * y);
    return Complex(delta - coeff * std::atanh(y), -0.5 * kPi * coeff);
}

double psi_shape(double x) {
    if (!(x >= 0.0)) throw std::domain_error("psi_shape: need x >= 0");
    if (x > 10.0) {
        // alternating inverse-power series; the closed form loses ~x^2 in
        // significance to the x - x cancellation
        double sum = 0.0;
        double xp = 1.0 / x;
        const double x2 = xp * xp;
        for (int j = 0; j < 24; ++j) {
            const double term = 4.0 * (j + 1) / double((2 * j + 1) * (2 * j + 3)) * xp;
            sum += (j % 2 == 0) ? term : -term;
            xp *= x2;
            if (term < 1e-18 * std::abs(sum)) break;
        }
        return 2.0 * sum;
    }
    if (x == 0.0) return kPi;
    return 2.0 * (x + (1.0 - x * x) * std::atan(1.0 / x));
}

double fermi_weight(double u, double b, double mu_over_kt) {
    const double m = std::abs(mu_over_kt);
    return sigmoid(b * u + m) + sigmoid(b * u - m);
}

RealAxisAux real_axis_aux(double omega_ev, double k_um, const GrapheneSheet& sheet) {
    if (!(omega_ev > 0.0))
        throw std::invalid_argument("real_axis_aux: omega must be > 0");
    if (!(k_um >= 0.0)) throw std::invalid_argument("real_axis_aux: k must be >= 0");
    sheet.validate();
    RealAxisAux aux;
    const double kt = Constants::k_boltzmann * sheet.temperature;
    const double delta = sheet.delta;
    aux.cap_k = sheet.vf_ratio * kHc * k_um;
    if (omega_ev > aux.cap_k) {
        aux.w_eff = omega_ev;
        double hcp = std::sqrt((omega_ev - aux.cap_k) * (omega_ev + aux.cap_k));
        bool diss = true;
        if (delta > 0.0) {
            if (std::abs(hcp - delta) <= kEdgeNudge * delta)
                hcp = delta * (1.0 + kEdgeNudge); // threshold owned by the lossy side
            else
                diss = hcp > delta;
        }
        aux.regime = diss ? TensorRegime::dissipative : TensorRegime::gapped_real;
        aux.hcp = hcp;
        aux.p = hcp / kHc;
        aux.big_a = (hcp - delta) * (hcp + delta) / (hcp * hcp);
        aux.d_tilde = delta / hcp;
        aux.b_tilde = hcp / (2.0 * kt);
        if (diss) {
            const double ka = aux.cap_k * std::sqrt(aux.big_a);
            aux.u1 = (aux.w_eff - ka) / hcp;
            aux.u2 = (aux.w_eff + ka) / hcp;
        }
    } else {
        // subluminal; the light-like line itself is resolved to this side
        aux.regime = TensorRegime::subluminal;
        aux.w_eff = std::min(omega_ev, aux.cap_k * (1.0 - kEdgeNudge));
        const double hcq =
            std::sqrt((aux.cap_k - aux.w_eff) * (aux.cap_k + aux.w_eff));
        aux.hcp = hcq;
        aux.q_tilde = hcq / kHc;
        aux.gamma_tilde = aux.w_eff / hcq;
        aux.big_d = delta / hcq;
        aux.big_b = hcq / (2.0 * kt);
    }
    return aux;
}

LocalKernels local_kernels_real_axis(double omega_ev, const GrapheneSheet& sheet,
                                     const QuadratureConfig& cfg) {
    if (!(omega_ev > 0.0))
        throw std::invalid_argument("local_kernels_real_axis: omega must be > 0");
    sheet.validate();
    const double delta = sheet.delta;
    const double kt = Constants::k_boltzmann * sheet.temperature;
    const double m = std::abs(sheet.mu) / kt;
    double w = omega_ev;
    bool diss = true;
    if (delta > 0.0) {
        if (std::abs(w - delta) <= kEdgeNudge * delta)
            w = delta * (1.0 + kEdgeNudge);
        else
            diss = w > delta;
    }
    const double d0 = delta / w;
    const double b0 = w / (2.0 * kt);
    const double c1 = 0.5 * (1.0 + d0 * d0);
    const Complex phi = diss ? phi2(delta, w) : Complex(phi1(delta, w), 0.0);
    auto w0 = [b0, m](double u) { return fermi_weight(u, b0, m); };
    const double u_max = d0 + (kTailExponent + m) / b0;

    double i_half;
    {
        auto r = integrate_finite([&](double u) { return w0(u); }, d0, u_max, cfg);
        i_half = 0.5 * r.value;
    }

    // principal-value integral of w0(u)/(u^2 - 1) from d0
    double i_pv = 0.0;
    auto log_leg = [&](double lo_dist, double hi_u) {
        // integral over [1 + lo_dist, hi_u] in s = log(u - 1), which soaks the
        // near-edge 1/(u - 1) growth
        const double s_lo = std::log(lo_dist);
        const double s_hi = std::log(hi_u - 1.0);
        if (!(s_hi > s_lo)) return;
        auto f = [&](double s) {
            const double e = std::exp(s);
            return w0(1.0 + e) / (2.0 + e);
        };
        auto r = integrate_finite(f, s_lo, s_hi, cfg);
        i_pv += r.value;
    };
    auto plain_leg = [&](double lo) {
        if (!(u_max > lo)) return;
        auto f = [&](double u) { return w0(u) / ((u - 1.0) * (u + 1.0)); };
        auto r = integrate_finite(f, lo, u_max, cfg);
        i_pv += r.value;
    };
    if (diss) {
        const double h = 1.0 - d0;
        // symmetric difference around the principal-value point
        const double wp1 = b0 * (sigmoid_deriv(b0 + m) + sigmoid_deriv(b0 - m));
        const double hlim = wp1 - 0.5 * w0(1.0); // limit of the difference quotient
        auto sym = [&](double t) {
            if (t < 1e-7) return hlim;
            return (w0(1.0 + t) / (2.0 + t) - w0(1.0 - t) / (2.0 - t)) / t;
        };
        {
            auto r = integrate_finite(sym, 0.0, h, cfg);
            i_pv += r.value;
        }
        if (u_max > 2.0 - d0) {
            log_leg(h, std::min(u_max, 2.0));
            plain_leg(2.0);
        }
    } else if (d0 < 2.0) {
        log_leg(d0 - 1.0, std::min(u_max, 2.0));
        plain_leg(2.0);
    } else {
        plain_leg(d0);
    }

    LocalKernels out;
    out.dissipative = diss;
    out.k00 = -(2.0 * kAlpha * kHc / (w * w)) * phi -
              (4.0 * kAlpha * kHc / w) * (i_half + c1 * i_pv);
    if (diss) out.k00 += Complex(0.0, -2.0 * kPi * kAlpha * kHc * c1 * w0(1.0) / w);
    out.ktr = -(w * w / (kHc * kHc)) * out.k00;
    return out;
}

LocalKernelsImag local_kernels_imag_axis(double xi_ev, const GrapheneSheet& sheet,
                                         const QuadratureConfig& cfg) {
    if (!(xi_ev > 0.0))
        throw std::domain_error(
            "local_kernels_imag_axis: xi must be > 0 (thermal divergence at zero)");
    sheet.validate();
    const double kt = Constants::k_boltzmann * sheet.temperature;
    const double m = std::abs(sheet.mu) / kt;
    const double d0 = sheet.delta / xi_ev;
    const double b0 = xi_ev / (2.0 * kt);
    const double u_max = d0 + (kTailExponent + m) / b0;
    auto f = [&](double u) {
        return fermi_weight(u, b0, m) * (u * u + d0 * d0) / (1.0 + u * u);
    };
    auto r = integrate_finite(f, d0, u_max, cfg);
    LocalKernelsImag out;
    out.k00 = (kAlpha * kHc / xi_ev) * (psi_shape(d0) + 2.0 * r.value);
    out.ktr = (xi_ev * xi_ev / (kHc * kHc)) * out.k00;
    return out;
}

double local_te_kernel_zero_freq(const GrapheneSheet& sheet, const QuadratureConfig& cfg) {
    sheet.validate();
    const double kt = Constants::k_boltzmann * sheet.temperature;
    const double m = std::abs(sheet.mu) / kt;
    const double d2 = sheet.delta * sheet.delta;
    auto f = [&](double e) {
        const double shape = (d2 > 0.0) ? 1.0 + d2 / (4.0 * e * e) : 1.0;
        return fermi_weight(e, 1.0 / kt, m) * shape;
    };
    auto r = integrate_semi_infinite(f, 0.5 * sheet.delta, cfg, DecayHint{1.0 / kt, m});
    return 4.0 * kAlpha * r.value / kHc;
}

PolTensorPoint pi_components_real_axis(double omega_ev, double k_um,
                                       const GrapheneSheet& sheet, ResponseMode mode,
                                       const QuadratureConfig& cfg) {
    if (!(omega_ev > 0.0))
        throw std::invalid_argument("pi_components_real_axis: omega must be > 0");
    if (!(k_um >= 0.0))
        throw std::invalid_argument("pi_components_real_axis: k must be >= 0");
    sheet.validate();
    const double kk = sheet.vf_ratio * kHc * k_um;
    if (mode == ResponseMode::local || kk <= kLocalCrossover * omega_ev) {
        const LocalKernels kern = local_kernels_real_axis(omega_ev, sheet, cfg);
        PolTensorPoint out;
        out.regime =
            kern.dissipative ? TensorRegime::dissipative : TensorRegime::gapped_real;
        out.pi00 = (k_um * k_um) * kern.k00;
        out.pi = (k_um * k_um) * kern.ktr;
        return out;
    }
    const RealAxisAux aux = real_axis_aux(omega_ev, k_um, sheet);
    if (aux.regime == TensorRegime::subluminal)
        return eval_subluminal(aux, k_um, sheet, cfg);
    return eval_timelike(aux, k_um, sheet, cfg);
}

PolTensorPoint pi_components_imag_axis(double xi_ev, double k_um,
                                       const GrapheneSheet& sheet, ResponseMode mode,
                                       const QuadratureConfig& cfg) {
    if (!(xi_ev >= 0.0))
        throw std::invalid_argument("pi_components_imag_axis: xi must be >= 0");
    if (!(k_um >= 0.0))
        throw std::invalid_argument("pi_components_imag_axis: k must be >= 0");
    sheet.validate();
    if (xi_ev == 0.0 && k_um == 0.0)
        throw std::domain_error("pi_components_imag_axis: xi and k cannot both vanish");
    const double kk = sheet.vf_ratio * kHc * k_um;
    if (mode == ResponseMode::local || (xi_ev > 0.0 && kk <= kLocalCrossover * xi_ev)) {
        const LocalKernelsImag kern = local_kernels_imag_axis(xi_ev, sheet, cfg);
        PolTensorPoint out;
        out.regime = TensorRegime::imaginary_axis;
        out.pi00 = Complex(k_um * k_um * kern.k00, 0.0);
        out.pi = Complex(k_um * k_um * kern.ktr, 0.0);
        return out;
    }
    return eval_imag(xi_ev, k_um, sheet, cfg);
}

} // namespace casneq
