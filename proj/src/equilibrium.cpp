#include "casneq/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "casneq/parallel.hpp"

namespace casneq {

namespace {

// Exponential range of the round-trip factor kept in the k-integral: the
// integrand carries e^{-y} with y = 2 a q_l, negligible beyond this.
constexpr double kRoundTripCut = 120.0;
// Frequency terms evaluated concurrently between truncation checks.
constexpr int kBlock = 16;
// Consecutive below-threshold terms required before the sum is declared
// converged (a single small term can be an accidental zero crossing).
constexpr int kQuietTerms = 3;

// One frequency term: the k-integral in the round-trip variable y = 2 a q_l,
//   (8 a^3)^{-1} Int_{y0}^{cut} y^2 dy  Sum_alpha  rr e^{-y} / (1 - rr e^{-y})
// with rr the product of the two plates' coefficients at frequency xi.
double k_integral(const PlateResponse& p1, const PlateResponse& p2,
                  bool same_plates, double xi, double a,
                  const QuadratureConfig& qcfg) {
    const double xoc = xi / Constants::hbar_c;
    const double y0 = 2.0 * a * xoc;
    if (y0 >= kRoundTripCut) return 0.0;
    auto f = [&](double y) {
        const double q = y / (2.0 * a);
        // q >= xoc up to rounding; the clamp keeps k strictly positive
        const double k =
            std::max(std::sqrt(std::max((q - xoc) * (q + xoc), 0.0)), 1e-120);
        const ReflectionPair r1 = p1.imag_axis(xi, k, qcfg);
        const ReflectionPair r2 = same_plates ? r1 : p2.imag_axis(xi, k, qcfg);
        const double e = std::exp(-y);
        const double tm = r1.r_tm.real() * r2.r_tm.real() * e;
        const double te = r1.r_te.real() * r2.r_te.real() * e;
        return y * y * (tm / (1.0 - tm) + te / (1.0 - te));
    };
    return integrate_finite(f, y0, kRoundTripCut, qcfg).value /
           (8.0 * a * a * a);
}

// Primed sum over the frequency grid of temperature t_freq: l = 0 at half
// weight, then blocks of terms evaluated concurrently and reduced in fixed
// order, stopping after kQuietTerms consecutive negligible terms.
double lifshitz_sum(const PlateResponse& p1, const PlateResponse& p2,
                    double t_freq, double a, const MatsubaraConfig& mcfg,
                    const QuadratureConfig& qcfg) {
    const bool same = p1.equivalent_to(p2);
    double total = 0.5 * k_integral(p1, p2, same, 0.0, a, qcfg);
    int quiet = 0;
    for (int l_start = 1; l_start <= mcfg.max_terms; l_start += kBlock) {
        const int block = std::min(kBlock, mcfg.max_terms - l_start + 1);
        std::vector<double> terms(block);
        parallel_for_indexed(block, [&](std::size_t i) {
            const double xi =
                matsubara_frequency(l_start + static_cast<int>(i), t_freq);
            terms[i] = k_integral(p1, p2, same, xi, a, qcfg);
        });
        for (const double term : terms) {
            total += term;
            if (std::abs(term) <= mcfg.rel_truncation * std::abs(total)) {
                if (++quiet >= kQuietTerms) return total;
            } else {
                quiet = 0;
            }
        }
    }
    throw TruncationError(
        "matsubara sum: max_terms reached before the tail criterion", total);
}

} // namespace

double matsubara_frequency(int l, double t_kelvin) {
    if (l < 0) throw std::invalid_argument("matsubara_frequency: l must be >= 0");
    if (!(t_kelvin > 0.0))
        throw std::invalid_argument("matsubara_frequency: T must be > 0");
    return 2.0 * M_PI * Constants::k_boltzmann * t_kelvin * l;
}

double quasi_eq_pressure(const Scenario& scn, const MatsubaraConfig& mcfg,
                         const QuadratureConfig& qcfg) {
    scn.validate();
    mcfg.validate();
    const PlateResponse p1 = PlateResponse::from_scenario(scn, 1);
    const PlateResponse p2 = PlateResponse::from_scenario(scn, 2);
    const double a = scn.separation;
    const double s1 = lifshitz_sum(p1, p2, scn.t_plate1, a, mcfg, qcfg);
    const double s2 = scn.t_plate2 == scn.t_plate1
                          ? s1
                          : lifshitz_sum(p1, p2, scn.t_plate2, a, mcfg, qcfg);
    return -(Constants::k_boltzmann / (2.0 * M_PI)) *
           (scn.t_plate1 * s1 + scn.t_plate2 * s2);
}

double eq_pressure(const Scenario& scn, double t_kelvin,
                   const MatsubaraConfig& mcfg, const QuadratureConfig& qcfg) {
    Scenario eq = scn;
    eq.t_env = eq.t_plate1 = eq.t_plate2 = t_kelvin;
    eq.sheet1.temperature = eq.sheet2.temperature = t_kelvin;
    return quasi_eq_pressure(eq, mcfg, qcfg);
}

} // namespace casneq
