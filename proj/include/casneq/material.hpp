#pragma once

#include <atomic>
#include <cstdint>
#include <istream>
#include <string>
#include <vector>

#include "casneq/constants.hpp"
#include "casneq/quadrature.hpp"

namespace casneq {

// Tabulated optical constants: photon energy [eV], refractive index n > 0,
// extinction coefficient k >= 0, strictly increasing in energy.
struct OpticalTable {
    std::vector<double> omega;
    std::vector<double> n;
    std::vector<double> k;

    std::size_t size() const { return omega.size(); }
};

// Parses whitespace-separated "omega n k" rows; '#' starts a comment, blank
// lines are skipped. Rows are sorted by energy; duplicate energies and
// non-physical values are rejected with the offending line number.
OpticalTable load_optical_table(std::istream& in);
OpticalTable load_optical_table_file(const std::string& path);

// Dielectric response built from an optical table. Real-axis values come
// from eps = (n + ik)^2 with log-log interpolation between nodes; the
// imaginary-axis response is the dispersion integral
//   eps(i xi) = 1 + (2/pi) * Int_0^inf x Im eps(x) / (x^2 + xi^2) dx
// over the tabulated range (absorption outside it is treated as zero),
// evaluated on a log grid at construction and interpolated afterwards.
class PermittivityModel {
  public:
    explicit PermittivityModel(OpticalTable table, QuadratureConfig cfg = {});

    Complex eps_real_axis(double omega_ev) const;
    double eps_imag_axis(double xi_ev) const; // xi >= 0
    double eps_static() const { return eps0_; }

    // Number of real-axis queries outside the tabulated range (clamped).
    std::uint64_t out_of_range_count() const { return oor_.load(); }
    const OpticalTable& table() const { return table_; }

  private:
    double dispersion_integral(double xi) const;

    OpticalTable table_;
    QuadratureConfig qcfg_;
    double eps0_ = 1.0;
    std::vector<double> log_xi_;  // cache abscissae, log(xi)
    std::vector<double> log_em1_; // log(eps(i xi) - 1) at the abscissae
    mutable std::atomic<std::uint64_t> oor_{0};
};

} // namespace casneq
