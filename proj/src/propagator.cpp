#include "phonon/propagator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace phonon {
namespace {

void require_nonnegative_time(Time t, const char* where) {
    if (t.value() < 0.0) {
        throw std::invalid_argument(std::string(where) + ": time must be non-negative");
    }
}

// Shortest timescale the integrator has to resolve: the fastest coupled mode
// period, the Gaussian collapse time 2/sqrt(sum theta_sq omega^2), and the
// decay envelope itself.
double finest_timescale(const CouplingSet& couplings, double envelope_rate) {
    double finest = 1.0 / envelope_rate;
    if (couplings.has_coupled_modes()) {
        finest = std::min(finest, two_pi / couplings.max_coupled_omega().value());
        const double collapse_sq = couplings.theta_omega_sq_sum();
        if (collapse_sq > 0.0) {
            finest = std::min(finest, 2.0 / std::sqrt(collapse_sq));
        }
    }
    return finest;
}

}  // namespace

PhiValue phi(Time t, const CouplingSet& couplings) {
    require_nonnegative_time(t, "phi");
    KahanAccumulator real;
    KahanAccumulator imag;
    for (const CouplingEntry& e : couplings.entries()) {
        const double phase = e.omega.value() * t.value();
        const double half = std::sin(0.5 * phase);
        // -theta^2 sin^2(wt/2) - eta^2 (1 - cos wt), with 1 - cos wt = 2 sin^2(wt/2)
        real.add(-(e.theta_sq + 2.0 * e.eta_sq) * half * half);
        imag.add(-e.eta_sq * std::sin(phase));
    }
    // every summand is non-positive; keep float noise out of the sign
    return PhiValue{std::min(real.sum(), 0.0), imag.sum()};
}

double phi_real_part(Time t, const CouplingSet& couplings) {
    KahanAccumulator real;
    for (const CouplingEntry& e : couplings.entries()) {
        const double half = std::sin(0.5 * e.omega.value() * t.value());
        real.add(-(e.theta_sq + 2.0 * e.eta_sq) * half * half);
    }
    return std::min(real.sum(), 0.0);
}

PhiValue phi_coth_form(Time t, const CouplingSet& couplings, Temperature T) {
    require_nonnegative_time(t, "phi_coth_form");
    if (!(T.value() > 0.0)) {
        throw ZeroTemperatureError("phi_coth_form: undefined at T = 0, use phi");
    }
    KahanAccumulator real;
    KahanAccumulator imag;
    for (const CouplingEntry& e : couplings.entries()) {
        const double phase = e.omega.value() * t.value();
        const double half = std::sin(0.5 * phase);
        const double coth = 1.0 / std::tanh(0.5 * thermal_ratio(e.omega, T));
        // cos(wt) - 1 evaluated as -2 sin^2(wt/2); the naive form loses all
        // precision for the slow modes where wt ~ 1e-8
        real.add(e.eta_sq * coth * (-2.0 * half * half));
        imag.add(-e.eta_sq * std::sin(phase));
    }
    return PhiValue{std::min(real.sum(), 0.0), imag.sum()};
}

CoherenceSample coherence(Time t, const CouplingSet& couplings) {
    const PhiValue value = phi(t, couplings);
    // straight real exponential; |exp(Phi)|^2 through complex arithmetic
    // would overflow its intermediates long before this underflows
    return CoherenceSample{t, value.real, value.imag, std::exp(2.0 * value.real)};
}

std::vector<SpectrumSample> spectrum(const CouplingSet& couplings, Rate gamma,
                                     std::span<const AngularFrequency> detuning_grid,
                                     const QuadratureConfig& cfg) {
    cfg.validate();
    if (!(gamma.value() > 0.0)) {
        throw std::invalid_argument("spectrum: gamma must be positive");
    }
    if (detuning_grid.empty()) {
        return {};
    }

    const double envelope_rate = 0.5 * gamma.value();
    const double t_max = -std::log(cfg.envelope_cutoff) / envelope_rate;
    double finest = finest_timescale(couplings, envelope_rate);
    double max_abs_detuning = 0.0;
    for (const AngularFrequency& w : detuning_grid) {
        max_abs_detuning = std::max(max_abs_detuning, std::abs(w.value()));
    }
    if (max_abs_detuning > 0.0) {
        finest = std::min(finest, two_pi / max_abs_detuning);
    }
    const double h_max = cfg.max_step_fraction * finest;

    const auto panels = static_cast<std::size_t>(std::ceil(t_max / h_max));
    if (panels > cfg.max_panels) {
        throw QuadratureError("spectrum: panel budget exceeded", 0.0,
                              std::numeric_limits<double>::infinity());
    }
    const double width = t_max / static_cast<double>(panels);

    // The quadrature nodes are shared by every grid point, so the coherence
    // (the expensive mode sum) is evaluated once per node and reused.
    struct Node {
        double t = 0.0;
        double amplitude = 0.0;  // e^{phi_real - gamma t / 2}
        double phi_imag = 0.0;
    };
    std::vector<Node> nodes(panels * 15);
    detail::parallel_chunks(panels, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            const double a = width * static_cast<double>(i);
            const double b = (i + 1 == panels) ? t_max : width * static_cast<double>(i + 1);
            const double center = 0.5 * (a + b);
            const double halfwidth = 0.5 * (b - a);
            Node* panel_nodes = &nodes[i * 15];
            // node order: center, then (lo, hi) pairs from the outermost abscissa in
            for (int j = 0; j < 7; ++j) {
                const double dx = halfwidth * detail::kGkNodes[j];
                panel_nodes[1 + 2 * j].t = center - dx;
                panel_nodes[2 + 2 * j].t = center + dx;
            }
            panel_nodes[0].t = center;
            for (int k = 0; k < 15; ++k) {
                const PhiValue p = phi(Time{panel_nodes[k].t}, couplings);
                panel_nodes[k].amplitude = std::exp(p.real - envelope_rate * panel_nodes[k].t);
                panel_nodes[k].phi_imag = p.imag;
            }
        }
    });

    std::vector<SpectrumSample> samples(detuning_grid.size());
    detail::parallel_chunks(detuning_grid.size(), [&](std::size_t begin, std::size_t end) {
        for (std::size_t gi = begin; gi < end; ++gi) {
            const double w = detuning_grid[gi].value();
            KahanAccumulator value;
            for (std::size_t i = 0; i < panels; ++i) {
                const Node* panel_nodes = &nodes[i * 15];
                const double halfwidth =
                    0.5 * (((i + 1 == panels) ? t_max : width * static_cast<double>(i + 1)) -
                           width * static_cast<double>(i));
                const auto integrand = [&](const Node& node) {
                    return node.amplitude * std::cos(node.phi_imag - w * node.t);
                };
                double kronrod = detail::kKronrodWeights[7] * integrand(panel_nodes[0]);
                for (int j = 0; j < 7; ++j) {
                    kronrod += detail::kKronrodWeights[j] * (integrand(panel_nodes[1 + 2 * j]) +
                                                             integrand(panel_nodes[2 + 2 * j]));
                }
                value.add(kronrod * halfwidth);
            }
            samples[gi] = SpectrumSample{detuning_grid[gi], value.sum()};
        }
    });
    return samples;
}

}  // namespace phonon
