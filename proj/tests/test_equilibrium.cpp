#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "casneq/equilibrium.hpp"

#include <cmath>
#include <memory>

#include "oracles.hpp"

using casneq::Constants;
using casneq::GrapheneSheet;
using casneq::MatsubaraConfig;
using casneq::PermittivityModel;
using casneq::QuadratureConfig;
using casneq::ResponseMode;
using casneq::Scenario;
using casneq::StackKind;
using casneq::TruncationError;

namespace {

constexpr double hc = Constants::hbar_c;
constexpr double kb = Constants::k_boltzmann;
constexpr double pi = 3.14159265358979323846;

// Independent constant-eps Lifshitz evaluation: k-space midpoint grid, own
// frequency loop, own truncation. Shares only the closed Fresnel forms.
struct FresnelLifshitz {
    double eps = 2.0;
    double a = 0.5;
    double l0_weight = 0.5;

    double term(double xi) const {
        const double xoc = xi / hc;
        const double qmax = 60.0 / a; // e^{-2qa} below 1e-26 past here
        if (qmax <= xoc) return 0.0;
        const double kmax = std::sqrt((qmax - xoc) * (qmax + xoc));
        auto f = [&](double k) {
            const double q = std::hypot(k, xoc);
            const double rtm = oracles::fresnel_tm_imag(eps, xoc / k);
            const double rte = oracles::fresnel_te_imag(eps, xoc / k);
            const double e2qa = std::exp(2.0 * q * a);
            return q * k *
                   (rtm * rtm / (e2qa - rtm * rtm) +
                    rte * rte / (e2qa - rte * rte));
        };
        return oracles::midpoint_sum(f, 0.0, kmax, 20000);
    }

    double sum(double t) const {
        double total = l0_weight * term(0.0);
        for (int l = 1; l < 4000; ++l) {
            const double v = term(2.0 * pi * kb * t * l);
            total += v;
            if (std::abs(v) < 1e-13 * std::abs(total)) break;
        }
        return total;
    }

    double quasi_pressure(double t1, double t2) const {
        return -(kb / (2.0 * pi)) * (t1 * sum(t1) + t2 * sum(t2));
    }
};

Scenario const_eps_scenario(double eps, double a, double t1, double t2) {
    Scenario scn;
    scn.stack = StackKind::const_eps;
    scn.eps_const = eps;
    scn.separation = a;
    scn.t_plate1 = t1;
    scn.t_plate2 = t2;
    return scn;
}

std::shared_ptr<const PermittivityModel> sio2() {
    static const auto model = std::make_shared<const PermittivityModel>(
        casneq::load_optical_table_file(CASNEQ_DEFAULT_MATERIAL));
    return model;
}

GrapheneSheet make_sheet(double delta, double mu, double t) {
    GrapheneSheet s;
    s.delta = delta;
    s.mu = mu;
    s.temperature = t;
    return s;
}

Scenario graphene_scenario(double a, double mu, double t1, double t2,
                           ResponseMode mode = ResponseMode::nonlocal) {
    Scenario scn;
    scn.separation = a;
    scn.t_plate1 = t1;
    scn.t_plate2 = t2;
    scn.sheet1 = make_sheet(0.3, mu, t1);
    scn.sheet2 = make_sheet(0.3, mu, t2);
    scn.substrate = sio2();
    scn.mode = mode;
    return scn;
}

} // namespace

TEST_CASE("thermal frequencies are linear with the documented scale") {
    CHECK(casneq::matsubara_frequency(0, 300.0) == 0.0);
    CHECK(casneq::matsubara_frequency(1, 300.0) ==
          doctest::Approx(2.0 * pi * kb * 300.0).epsilon(1e-15));
    CHECK(casneq::matsubara_frequency(1, 300.0) ==
          doctest::Approx(0.1624323).epsilon(1e-6));
    CHECK(casneq::matsubara_frequency(10, 77.0) ==
          doctest::Approx(10.0 * casneq::matsubara_frequency(1, 77.0))
              .epsilon(1e-15));
    CHECK_THROWS_AS(casneq::matsubara_frequency(-1, 300.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(casneq::matsubara_frequency(1, 0.0), std::invalid_argument);
}

TEST_CASE("mirror plates at low temperature reach the quarter-power law") {
    Scenario scn;
    scn.stack = StackKind::ideal_mirror;
    scn.separation = 0.2;
    MatsubaraConfig mcfg;
    mcfg.rel_truncation = 1e-6; // the near-continuum grid decays slowly
    const double p = casneq::eq_pressure(scn, 1.0, mcfg);
    const double ideal = -pi * pi * hc / (240.0 * std::pow(0.2, 4.0));
    CHECK(p < 0.0);
    CHECK(p == doctest::Approx(ideal).epsilon(5e-3));
    // the spec-level magnitude in pascal
    CHECK(casneq::pressure_to_pascal(std::abs(p)) ==
          doctest::Approx(0.81251).epsilon(5e-3));
}

TEST_CASE("constant-eps pressures match the independent k-space oracle") {
    FresnelLifshitz ref;
    ref.eps = 2.5;
    ref.a = 0.5;

    const auto scn = const_eps_scenario(2.5, 0.5, 300.0, 500.0);
    const double got = casneq::quasi_eq_pressure(scn);
    const double want = ref.quasi_pressure(300.0, 500.0);
    CHECK(got == doctest::Approx(want).epsilon(3e-7));
    CHECK(got < 0.0);

    const double eq = casneq::eq_pressure(scn, 300.0);
    CHECK(eq == doctest::Approx(ref.quasi_pressure(300.0, 300.0)).epsilon(3e-7));
}

TEST_CASE("zero-frequency term carries half weight") {
    FresnelLifshitz half;
    half.eps = 3.0;
    half.a = 0.4;
    FresnelLifshitz full = half;
    full.l0_weight = 1.0;

    const auto scn = const_eps_scenario(3.0, 0.4, 300.0, 300.0);
    const double got = casneq::eq_pressure(scn, 300.0);
    CHECK(got == doctest::Approx(half.quasi_pressure(300.0, 300.0)).epsilon(3e-7));

    // doubling the l = 0 weight must shift the result by exactly that term
    const double shift = -(kb / pi) * 300.0 * 0.5 * half.term(0.0);
    const double mismatch = got - full.quasi_pressure(300.0, 300.0);
    CHECK(mismatch == doctest::Approx(-shift).epsilon(1e-6));
}

TEST_CASE("temperature enters constant-eps plates only through the grid") {
    const auto scn = const_eps_scenario(3.9, 0.6, 300.0, 500.0);
    const double quasi = casneq::quasi_eq_pressure(scn);
    const double half_sum = 0.5 * (casneq::eq_pressure(scn, 300.0) +
                                   casneq::eq_pressure(scn, 500.0));
    CHECK(quasi == doctest::Approx(half_sum).epsilon(1e-9));
}

TEST_CASE("pressure magnitude decays with separation") {
    const auto near = const_eps_scenario(3.0, 0.3, 300.0, 300.0);
    const auto far = const_eps_scenario(3.0, 0.6, 300.0, 300.0);
    CHECK(std::abs(casneq::quasi_eq_pressure(near)) >
          std::abs(casneq::quasi_eq_pressure(far)));
}

TEST_CASE("tightening the tail criterion moves the result accordingly") {
    const auto scn = const_eps_scenario(2.0, 0.4, 300.0, 300.0);
    MatsubaraConfig loose;
    loose.rel_truncation = 1e-8;
    MatsubaraConfig tight;
    tight.rel_truncation = 1e-12;
    const double pl = casneq::quasi_eq_pressure(scn, loose);
    const double pt = casneq::quasi_eq_pressure(scn, tight);
    CHECK(std::abs(pl - pt) < 1e-7 * std::abs(pt));
}

TEST_CASE("hitting the term cap raises a truncation error with the partial sum") {
    Scenario scn;
    scn.stack = StackKind::ideal_mirror;
    scn.separation = 0.2;
    MatsubaraConfig mcfg;
    mcfg.max_terms = 50; // the 1 K grid needs thousands of terms
    try {
        casneq::eq_pressure(scn, 1.0, mcfg);
        FAIL("expected TruncationError");
    } catch (const TruncationError& e) {
        CHECK(e.partial() > 0.0);
    }
    CHECK_THROWS_AS(casneq::eq_pressure(scn, 1.0, MatsubaraConfig{1e-10, 0}),
                    std::invalid_argument);
}

TEST_CASE("swapping plate temperatures leaves identical coatings invariant") {
    QuadratureConfig qcfg;
    qcfg.rel_tol = 1e-6;
    MatsubaraConfig mcfg;
    mcfg.rel_truncation = 1e-8;

    const auto fwd = graphene_scenario(1.5, 0.0, 300.0, 600.0);
    const auto rev = graphene_scenario(1.5, 0.0, 600.0, 300.0);
    const double p_fwd = casneq::quasi_eq_pressure(fwd, mcfg, qcfg);
    const double p_rev = casneq::quasi_eq_pressure(rev, mcfg, qcfg);
    CHECK(p_fwd == p_rev); // the factor product commutes term by term
    CHECK(p_fwd < 0.0);
}

TEST_CASE("coated equal-temperature plates reduce to the equilibrium form") {
    QuadratureConfig qcfg;
    qcfg.rel_tol = 1e-6;
    MatsubaraConfig mcfg;
    mcfg.rel_truncation = 1e-8;

    const auto scn = graphene_scenario(1.0, 0.1, 300.0, 300.0);
    const double quasi = casneq::quasi_eq_pressure(scn, mcfg, qcfg);
    const double eq = casneq::eq_pressure(scn, 300.0, mcfg, qcfg);
    CHECK(quasi == eq); // same sums in both paths
}

TEST_CASE("local and nonlocal coated pressures stay within a few percent") {
    QuadratureConfig qcfg;
    qcfg.rel_tol = 1e-6;
    MatsubaraConfig mcfg;
    mcfg.rel_truncation = 1e-7;

    const auto nl = graphene_scenario(0.2, 0.25, 300.0, 300.0);
    const auto loc = graphene_scenario(0.2, 0.25, 300.0, 300.0, ResponseMode::local);
    const double p_nl = casneq::eq_pressure(nl, 300.0, mcfg, qcfg);
    const double p_loc = casneq::eq_pressure(loc, 300.0, mcfg, qcfg);
    CHECK(p_nl < 0.0);
    CHECK(p_loc < 0.0);
    CHECK(std::abs(p_loc - p_nl) < 0.05 * std::abs(p_nl));
}
