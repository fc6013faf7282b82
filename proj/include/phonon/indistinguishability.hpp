// indistinguishability.hpp — two-photon indistinguishability and figures of merit.
//
//   I = Gamma int_0^inf dt e^{-Gamma t} |P(t)|^2,   Gamma = F_p * Gamma_bulk
//
// The integral is truncated where the decay envelope reaches envelope_cutoff
// and evaluated adaptively with panel widths that resolve both the fastest
// coupled mode period and the Gaussian collapse of |P|. The efficiency side
// is the single-mode model epsilon = beta * overlap with
// beta = Gamma_C / (Gamma_C + Gamma_B); the optics quantities (purcell,
// overlap or efficiency) are scenario inputs, never computed here.

#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "phonon/coupling.hpp"
#include "phonon/numerics.hpp"
#include "phonon/units.hpp"

namespace phonon {

// Full experiment description for one merit computation.
struct Scenario {
    std::string catalog_label;
    Temperature temperature{4.0};
    QdPosition position = QdPosition::OnAxis;
    double purcell = 1.0;
    Rate gamma_bulk{1e9};
    Rate gamma_background{0.05e9};
    // exactly one of these: a directly supplied efficiency, or the Gaussian
    // far-field overlap from which epsilon = beta * overlap is formed
    std::optional<double> efficiency;
    std::optional<double> gaussian_overlap;

    [[nodiscard]] Rate gamma_cavity() const { return Rate{purcell * gamma_bulk.value()}; }
    void validate() const;
};

// Mirrors one column of the figures-of-merit table.
struct MeritReport {
    Scenario scenario;
    double purcell = 1.0;
    double beta = 1.0;
    double efficiency = 1.0;
    double indistinguishability = 1.0;
    double product = 1.0;  // efficiency * indistinguishability
};

struct IndistinguishabilityResult {
    double value = 1.0;
    double error_estimate = 0.0;
    std::size_t panels = 0;
    std::size_t evaluations = 0;
};

IndistinguishabilityResult indistinguishability(const CouplingSet& couplings, Rate gamma,
                                                const QuadratureConfig& cfg = {});

// beta = gamma_c / (gamma_c + gamma_b)
double beta_factor(Rate gamma_c, Rate gamma_b);

// epsilon = beta * overlap
double efficiency(double beta, double overlap);

MeritReport merit_report(const Scenario& scenario, const ModeCatalog& catalog,
                         const QuadratureConfig& cfg = {});

struct SweepPoint {
    Temperature temperature;
    double indistinguishability = 1.0;
};

// One indistinguishability per temperature; points are independent and run in
// parallel, output order matches input order.
std::vector<SweepPoint> temperature_sweep(const Scenario& scenario, const ModeCatalog& catalog,
                                          std::span<const Temperature> temperatures,
                                          const QuadratureConfig& cfg = {});

}  // namespace phonon
