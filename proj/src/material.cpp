#include "casneq/material.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace casneq {

namespace {

[[noreturn]] void parse_error(std::size_t line, const std::string& what) {
    std::ostringstream os;
    os << "optical table, line " << line << ": " << what;
    throw std::runtime_error(os.str());
}

double safe_log(double v) { return std::log(std::max(v, 1e-300)); }

// Piecewise interpolation of one channel (n or k) at energy w inside segment
// [i, i+1]; log-log when both endpoint values are positive, otherwise linear
// in log-energy so zero absorption stays exactly zero at the nodes.
double channel_at(const std::vector<double>& omega, const std::vector<double>& val,
                  std::size_t i, double w) {
    const double lw0 = std::log(omega[i]);
    const double lw1 = std::log(omega[i + 1]);
    const double t = (std::log(w) - lw0) / (lw1 - lw0);
    if (val[i] > 0.0 && val[i + 1] > 0.0)
        return std::exp((1.0 - t) * std::log(val[i]) + t * std::log(val[i + 1]));
    return (1.0 - t) * val[i] + t * val[i + 1];
}

} // namespace

OpticalTable load_optical_table(std::istream& in) {
    struct Row {
        double w, n, k;
        std::size_t line;
    };
    std::vector<Row> rows;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        double w, n, k;
        if (!(ls >> w)) continue; // blank or comment-only
        if (!(ls >> n >> k)) parse_error(lineno, "expected three columns (omega n k)");
        double extra;
        if (ls >> extra) parse_error(lineno, "unexpected fourth column");
        if (!(w > 0.0)) parse_error(lineno, "photon energy must be > 0");
        if (!(n > 0.0)) parse_error(lineno, "refractive index must be > 0");
        if (!(k >= 0.0)) parse_error(lineno, "extinction coefficient must be >= 0");
        rows.push_back({w, n, k, lineno});
    }
    if (rows.size() < 2) throw std::runtime_error("optical table: need at least two rows");
    std::stable_sort(rows.begin(), rows.end(),
                     [](const Row& a, const Row& b) { return a.w < b.w; });
    OpticalTable t;
    t.omega.reserve(rows.size());
    t.n.reserve(rows.size());
    t.k.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (i > 0 && rows[i].w == rows[i - 1].w)
            parse_error(rows[i].line, "duplicate photon energy");
        t.omega.push_back(rows[i].w);
        t.n.push_back(rows[i].n);
        t.k.push_back(rows[i].k);
    }
    return t;
}

OpticalTable load_optical_table_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("optical table: cannot open " + path);
    return load_optical_table(f);
}

PermittivityModel::PermittivityModel(OpticalTable table, QuadratureConfig cfg)
    : table_(std::move(table)), qcfg_(cfg) {
    if (table_.size() < 2) throw std::invalid_argument("permittivity: table too small");
    // The dispersion integrand is smooth within each table segment, so no
    // forced subdivision is needed there.
    qcfg_.min_depth = 0;
    eps0_ = dispersion_integral(0.0);

    const double xi_lo = 1e-4, xi_hi = 1e3;
    const int npts = 400;
    log_xi_.resize(npts);
    log_em1_.resize(npts);
    const double step = (std::log(xi_hi) - std::log(xi_lo)) / (npts - 1);
    for (int i = 0; i < npts; ++i) {
        log_xi_[i] = std::log(xi_lo) + step * i;
        const double eps = dispersion_integral(std::exp(log_xi_[i]));
        log_em1_[i] = safe_log(eps - 1.0);
    }
}

Complex PermittivityModel::eps_real_axis(double omega_ev) const {
    if (!(omega_ev > 0.0))
        throw std::invalid_argument("permittivity: real-axis energy must be > 0");
    const auto& w = table_.omega;
    double n, k;
    if (omega_ev <= w.front()) {
        if (omega_ev < w.front()) oor_.fetch_add(1, std::memory_order_relaxed);
        n = table_.n.front();
        k = table_.k.front();
    } else if (omega_ev >= w.back()) {
        if (omega_ev > w.back()) oor_.fetch_add(1, std::memory_order_relaxed);
        n = table_.n.back();
        k = table_.k.back();
    } else {
        const auto it = std::upper_bound(w.begin(), w.end(), omega_ev);
        const std::size_t i = static_cast<std::size_t>(it - w.begin()) - 1;
        n = channel_at(w, table_.n, i, omega_ev);
        k = channel_at(w, table_.k, i, omega_ev);
    }
    const Complex nk(n, k);
    return nk * nk;
}

double PermittivityModel::dispersion_integral(double xi) const {
    const auto& w = table_.omega;
    const double xi2 = xi * xi;
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < w.size(); ++i) {
        if (table_.k[i] == 0.0 && table_.k[i + 1] == 0.0) continue;
        auto f = [&, i](double x) {
            const double n = channel_at(w, table_.n, i, x);
            const double k = channel_at(w, table_.k, i, x);
            return x * (2.0 * n * k) / (x * x + xi2);
        };
        sum += integrate_finite(f, w[i], w[i + 1], qcfg_).value;
    }
    return 1.0 + (2.0 / M_PI) * sum;
}

double PermittivityModel::eps_imag_axis(double xi_ev) const {
    if (!(xi_ev >= 0.0)) throw std::invalid_argument("permittivity: xi must be >= 0");
    if (xi_ev == 0.0) return eps0_;
    const double lx = std::log(xi_ev);
    if (lx <= log_xi_.front()) return 1.0 + std::exp(log_em1_.front());
    if (lx >= log_xi_.back()) {
        // Past the cache the tabulated absorption is far below xi, so the
        // dispersion integral falls off as 1/xi^2.
        const double em1_hi = std::exp(log_em1_.back());
        const double r = std::exp(log_xi_.back() - lx);
        return 1.0 + em1_hi * r * r;
    }
    const auto it = std::upper_bound(log_xi_.begin(), log_xi_.end(), lx);
    const std::size_t i = static_cast<std::size_t>(it - log_xi_.begin()) - 1;
    const double t = (lx - log_xi_[i]) / (log_xi_[i + 1] - log_xi_[i]);
    return 1.0 + std::exp((1.0 - t) * log_em1_[i] + t * log_em1_[i + 1]);
}

} // namespace casneq
