#pragma once

#include <stdexcept>
#include <string>

#include "casneq/reflection.hpp"

namespace casneq {

// Truncation policy for the thermal-frequency sums.
struct MatsubaraConfig {
    double rel_truncation = 1e-10; // tail-to-sum ratio that ends the sum
    int max_terms = 20000;         // hard cap on summed frequencies

    void validate() const {
        if (!(rel_truncation > 0.0 && rel_truncation < 1e-3))
            throw std::invalid_argument(
                "matsubara: rel_truncation must be in (0, 1e-3)");
        if (max_terms < 1)
            throw std::invalid_argument("matsubara: max_terms must be >= 1");
    }
};

// Thrown when a frequency sum hits max_terms before the tail criterion;
// carries the partial sum accumulated so far for diagnostics.
class TruncationError : public std::runtime_error {
  public:
    TruncationError(const std::string& what, double partial)
        : std::runtime_error(what), partial_(partial) {}
    double partial() const { return partial_; }

  private:
    double partial_ = 0.0;
};

// l-th thermal frequency as hbar*xi_l in eV: 2 pi k_B T l.
double matsubara_frequency(int l, double t_kelvin);

// Mixed-temperature Lifshitz-type pressure between the plates of `scn`
// (eV/um^3, negative = attraction). Two primed frequency sums, one per
// plate temperature; each term integrates both polarizations of the
// product of the two plates' coefficients, every factor evaluated at the
// outer sum's frequency but at its own plate's temperature.
double quasi_eq_pressure(const Scenario& scn, const MatsubaraConfig& mcfg = {},
                         const QuadratureConfig& qcfg = {});

// Standard equilibrium pressure: the same stack with plates, sheets, and
// frequency grid all at t_kelvin (the equal-temperature specialization).
double eq_pressure(const Scenario& scn, double t_kelvin,
                   const MatsubaraConfig& mcfg = {},
                   const QuadratureConfig& qcfg = {});

} // namespace casneq
