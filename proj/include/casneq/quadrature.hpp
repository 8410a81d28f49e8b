#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <type_traits>
#include <utility>

namespace casneq {

struct QuadratureConfig {
    double rel_tol = 1e-9;
    double abs_tol = 1e-14;
    int max_depth = 48;
    // Minimum bisection depth before an interval may be accepted; guards
    // against a deceptively smooth first panel on localized integrands.
    int min_depth = 2;
    // e-foldings after which a declared-decay tail is treated as negligible.
    double tail_decay_threshold = 40.0;
};

// Thrown when bisection exhausts max_depth and the accumulated error still
// misses the target; carries the best available estimate.
class QuadratureDepthError : public std::runtime_error {
  public:
    QuadratureDepthError(std::complex<double> best, double err)
        : std::runtime_error("adaptive quadrature: subdivision depth exhausted"),
          best_estimate(best),
          error_bound(err) {}
    std::complex<double> best_estimate;
    double error_bound;
};

template <class V>
struct IntegralResult {
    V value{};
    double error = 0.0; // absolute error estimate
};

// Small fixed-size complex vector so several integrands sharing structure can
// be integrated over one subdivision tree (component-wise error control via
// the max norm below).
template <int N>
struct ComplexVec {
    std::complex<double> v[N]{};

    std::complex<double>& operator[](int i) { return v[i]; }
    const std::complex<double>& operator[](int i) const { return v[i]; }

    friend ComplexVec operator+(ComplexVec a, const ComplexVec& b) {
        for (int i = 0; i < N; ++i) a.v[i] += b.v[i];
        return a;
    }
    friend ComplexVec operator-(ComplexVec a, const ComplexVec& b) {
        for (int i = 0; i < N; ++i) a.v[i] -= b.v[i];
        return a;
    }
    friend ComplexVec operator*(double s, ComplexVec a) {
        for (int i = 0; i < N; ++i) a.v[i] *= s;
        return a;
    }
    ComplexVec& operator+=(const ComplexVec& b) {
        for (int i = 0; i < N; ++i) v[i] += b.v[i];
        return *this;
    }
};

namespace quad_detail {

// 15-point Kronrod extension of the 7-point Gauss rule on [-1,1]; nodes by
// ascending magnitude, the embedded Gauss points sit at even indices.
inline constexpr double kNodes[8] = {
    0.000000000000000, 0.207784955007898, 0.405845151377397,
    0.586087235467691, 0.741531185599394, 0.864864423359769,
    0.949107912342759, 0.991455371120813};
inline constexpr double kWeightsK15[8] = {
    0.209482141084728, 0.204432940075298, 0.190350578064785,
    0.169004726639267, 0.140653259715525, 0.104790010322250,
    0.063092092629979, 0.022935322010529};
inline constexpr double kWeightsG7[4] = {
    0.417959183673469, 0.381830050505119, 0.279705391489277,
    0.129484966168870};

inline double abs_norm(double x) { return std::abs(x); }
inline double abs_norm(const std::complex<double>& x) { return std::abs(x); }
template <int N>
double abs_norm(const ComplexVec<N>& x) {
    double m = 0.0;
    for (int i = 0; i < N; ++i) m = std::max(m, std::abs(x.v[i]));
    return m;
}

inline std::complex<double> leading_component(double x) { return {x, 0.0}; }
inline std::complex<double> leading_component(const std::complex<double>& x) { return x; }
template <int N>
std::complex<double> leading_component(const ComplexVec<N>& x) {
    return x.v[0];
}

template <class F>
using value_t = std::decay_t<decltype(std::declval<F&>()(0.0))>;

template <class V>
struct Panel {
    V value{};
    double error = 0.0;
};

template <class F, class V = value_t<F>>
Panel<V> gk15(F& f, double a, double b) {
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    V fc = f(mid);
    V k15 = kWeightsK15[0] * fc;
    V g7 = kWeightsG7[0] * fc;
    for (int i = 1; i < 8; ++i) {
        const double dx = half * kNodes[i];
        V pair = f(mid - dx) + f(mid + dx);
        k15 += kWeightsK15[i] * pair;
        if ((i & 1) == 0) g7 += kWeightsG7[i / 2] * pair;
    }
    Panel<V> p;
    p.value = half * k15;
    const double diff = abs_norm(half * (k15 - g7));
    // Sharpened error model: the raw Gauss/Kronrod difference overestimates
    // once the rule is converging, (200*diff)^1.5 underestimates before that.
    p.error = (diff > 0.0) ? std::min(diff, std::pow(200.0 * diff, 1.5)) : 0.0;
    return p;
}

template <class F, class V>
struct AdaptiveWorker {
    F& f;
    const QuadratureConfig& cfg;
    double err_total = 0.0;
    bool exhausted = false;

    V run(double a, double b, const Panel<V>& whole, double tol, int depth) {
        const double mid = 0.5 * (a + b);
        const bool splittable = (mid > a && mid < b);
        if (depth >= cfg.min_depth || !splittable) {
            if (whole.error <= std::max(tol, cfg.abs_tol) || !splittable ||
                depth >= cfg.max_depth) {
                if (whole.error > std::max(tol, cfg.abs_tol)) exhausted = true;
                err_total += whole.error;
                return whole.value;
            }
        }
        Panel<V> left = gk15<F, V>(f, a, mid);
        Panel<V> right = gk15<F, V>(f, mid, b);
        const double half_tol = 0.5 * tol;
        V vl = run(a, mid, left, half_tol, depth + 1);
        V vr = run(mid, b, right, half_tol, depth + 1);
        return vl + vr;
    }
};

} // namespace quad_detail

// Adaptive integral of f over [a, b].
template <class F, class V = quad_detail::value_t<F>>
IntegralResult<V> integrate_finite(F&& f, double a, double b,
                                   const QuadratureConfig& cfg = {}) {
    if (!(a <= b)) throw std::invalid_argument("integrate_finite: bounds out of order");
    IntegralResult<V> out;
    if (a == b) return out;
    auto whole = quad_detail::gk15<F, V>(f, a, b);
    const double tol = std::max(cfg.abs_tol, cfg.rel_tol * quad_detail::abs_norm(whole.value));
    quad_detail::AdaptiveWorker<F, V> w{f, cfg};
    out.value = w.run(a, b, whole, tol, 0);
    out.error = w.err_total;
    const double final_tol =
        std::max(cfg.abs_tol, cfg.rel_tol * quad_detail::abs_norm(out.value));
    if (w.exhausted && out.error > final_tol)
        throw QuadratureDepthError(quad_detail::leading_component(out.value), out.error);
    return out;
}

// Known asymptotic behaviour of a semi-infinite integrand: |f| ~ exp(-rate*x)
// beyond some offset in the exponent (e.g. a chemical-potential shift).
struct DecayHint {
    double rate = 0.0;
    double extra_exponent = 0.0;
};

// Integral of f over [a, inf). With a declared decay rate the tail is cut
// once tail_decay_threshold (+extra) e-foldings are cleared; otherwise the
// domain is mapped logarithmically onto [0,1) (adequate for integrands
// decaying at least like exp(-x)).
template <class F, class V = quad_detail::value_t<F>>
IntegralResult<V> integrate_semi_infinite(F&& f, double a,
                                          const QuadratureConfig& cfg = {},
                                          DecayHint decay = {}) {
    if (decay.rate > 0.0) {
        const double span =
            (cfg.tail_decay_threshold + std::max(0.0, decay.extra_exponent)) / decay.rate;
        return integrate_finite(f, a, a + span, cfg);
    }
    auto g = [&f, a](double s) {
        const double om = 1.0 - s;
        return (1.0 / om) * f(a - std::log(om));
    };
    return integrate_finite(g, 0.0, 1.0, cfg);
}

enum class SingularEnd { lower, upper };

// Integral of f over [a, b] where f has an integrable inverse-square-root
// singularity at one endpoint; substituting the distance-to-endpoint = s^2
// regularizes it. Quadrature nodes never touch the singular point.
template <class F, class V = quad_detail::value_t<F>>
IntegralResult<V> integrate_sqrt_endpoint(F&& f, double a, double b, SingularEnd end,
                                          const QuadratureConfig& cfg = {}) {
    if (!(a <= b)) throw std::invalid_argument("integrate_sqrt_endpoint: bounds out of order");
    IntegralResult<V> out;
    if (a == b) return out;
    const double smax = std::sqrt(b - a);
    if (end == SingularEnd::lower) {
        auto g = [&f, a, b](double s) {
            const double x = std::min(a + s * s, b);
            return (2.0 * s) * f(x);
        };
        return integrate_finite(g, 0.0, smax, cfg);
    }
    auto g = [&f, a, b](double s) {
        const double x = std::max(b - s * s, a);
        return (2.0 * s) * f(x);
    };
    return integrate_finite(g, 0.0, smax, cfg);
}

} // namespace casneq
