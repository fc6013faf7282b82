#include "phonon/indistinguishability.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "phonon/propagator.hpp"

namespace phonon {

void Scenario::validate() const {
    if (!(purcell > 0.0)) {
        throw std::invalid_argument("scenario: purcell factor must be positive");
    }
    if (temperature.value() < 0.0) {
        throw std::invalid_argument("scenario: temperature must be non-negative");
    }
    if (!(gamma_bulk.value() > 0.0)) {
        throw std::invalid_argument("scenario: gamma_bulk must be positive");
    }
    if (gamma_background.value() < 0.0) {
        throw std::invalid_argument("scenario: background rate must be non-negative");
    }
    if (efficiency && gaussian_overlap) {
        throw std::invalid_argument("scenario: supply either efficiency or overlap, not both");
    }
    if (!efficiency && !gaussian_overlap) {
        throw std::invalid_argument("scenario: efficiency or overlap required");
    }
    const double supplied = efficiency ? *efficiency : *gaussian_overlap;
    if (supplied < 0.0 || supplied > 1.0) {
        throw std::invalid_argument("scenario: efficiency/overlap must lie in [0, 1]");
    }
}

IndistinguishabilityResult indistinguishability(const CouplingSet& couplings, Rate gamma,
                                                const QuadratureConfig& cfg) {
    cfg.validate();
    if (!(gamma.value() > 0.0)) {
        throw std::invalid_argument("indistinguishability: gamma must be positive");
    }
    const double rate = gamma.value();
    if (!couplings.has_coupled_modes()) {
        // |P|^2 = 1 identically; Gamma int_0^inf e^{-Gamma t} dt = 1
        return IndistinguishabilityResult{1.0, 0.0, 0, 0};
    }
    const double t_max = -std::log(cfg.envelope_cutoff) / rate;

    double finest = std::min(1.0 / rate, two_pi / couplings.max_coupled_omega().value());
    const double collapse_sq = couplings.theta_omega_sq_sum();
    if (collapse_sq > 0.0) {
        finest = std::min(finest, 2.0 / std::sqrt(collapse_sq));
    }
    const double h_max = cfg.max_step_fraction * finest;

    const auto integrand = [&](double t) {
        return rate * std::exp(-rate * t + 2.0 * phi_real_part(Time{t}, couplings));
    };
    const QuadratureOutcome outcome = integrate_adaptive(
        integrand, 0.0, t_max, cfg.rel_tol, h_max, cfg.max_depth, cfg.max_panels);

    // the exact integrand is bounded by Gamma e^{-Gamma t}, so I lies in [0, 1]
    return IndistinguishabilityResult{std::clamp(outcome.value, 0.0, 1.0), outcome.error_bound,
                                      outcome.panels, outcome.evaluations};
}

double beta_factor(Rate gamma_c, Rate gamma_b) {
    if (!(gamma_c.value() > 0.0)) {
        throw std::invalid_argument("beta_factor: cavity rate must be positive");
    }
    if (gamma_b.value() < 0.0) {
        throw std::invalid_argument("beta_factor: background rate must be non-negative");
    }
    return gamma_c.value() / (gamma_c.value() + gamma_b.value());
}

double efficiency(double beta, double overlap) {
    if (beta < 0.0 || beta > 1.0 || overlap < 0.0 || overlap > 1.0) {
        throw std::invalid_argument("efficiency: factors must lie in [0, 1]");
    }
    return beta * overlap;
}

MeritReport merit_report(const Scenario& scenario, const ModeCatalog& catalog,
                         const QuadratureConfig& cfg) {
    scenario.validate();
    if (scenario.catalog_label != catalog.structure_label()) {
        throw std::invalid_argument("merit_report: scenario expects catalog '" +
                                    scenario.catalog_label + "', got '" +
                                    catalog.structure_label() + "'");
    }
    const CouplingSet couplings =
        build_coupling_set(catalog, scenario.temperature, scenario.position);
    const Rate gamma_c = scenario.gamma_cavity();
    const double indist = indistinguishability(couplings, gamma_c, cfg).value;
    const double beta = beta_factor(gamma_c, scenario.gamma_background);
    const double eps =
        scenario.efficiency ? *scenario.efficiency : efficiency(beta, *scenario.gaussian_overlap);
    return MeritReport{scenario, scenario.purcell, beta, eps, indist, eps * indist};
}

std::vector<SweepPoint> temperature_sweep(const Scenario& scenario, const ModeCatalog& catalog,
                                          std::span<const Temperature> temperatures,
                                          const QuadratureConfig& cfg) {
    scenario.validate();
    if (scenario.catalog_label != catalog.structure_label()) {
        throw std::invalid_argument("temperature_sweep: scenario expects catalog '" +
                                    scenario.catalog_label + "', got '" +
                                    catalog.structure_label() + "'");
    }
    for (const Temperature& T : temperatures) {
        if (T.value() < 0.0) {
            throw std::invalid_argument("temperature_sweep: temperatures must be non-negative");
        }
    }
    std::vector<SweepPoint> points(temperatures.size());
    const Rate gamma_c = scenario.gamma_cavity();
    detail::parallel_chunks(temperatures.size(), [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            const CouplingSet couplings =
                build_coupling_set(catalog, temperatures[i], scenario.position);
            points[i] = SweepPoint{temperatures[i],
                                   indistinguishability(couplings, gamma_c, cfg).value};
        }
    });
    return points;
}

}  // namespace phonon
