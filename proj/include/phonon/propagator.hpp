// propagator.hpp — independent-boson coherence dynamics.
//
// Phi(t) = sum_m [ -theta_sq_m sin^2(omega_m t / 2) - eta_sq_m (1 - e^{-i omega_m t}) ]
// P(t)   = e^{Phi(t)}
// S(w)   = Re int_0^inf dt P(t) e^{-Gamma t / 2} e^{-i w t}
//
// The mode sum runs in catalog canonical order with compensated accumulation:
// theta_sq spans ~15 orders of magnitude across the catalog, and the fixed
// order is what makes results bit-reproducible.

#pragma once

#include <span>
#include <vector>

#include "phonon/coupling.hpp"
#include "phonon/numerics.hpp"
#include "phonon/units.hpp"

namespace phonon {

struct PhiValue {
    double real = 0.0;
    double imag = 0.0;
};

struct CoherenceSample {
    Time t;
    double phi_real = 0.0;
    double phi_imag = 0.0;
    double p_abs_sq = 1.0;  // |P(t)|^2 = e^{2 phi_real}
};

struct SpectrumSample {
    AngularFrequency detuning;  // offset from the zero-phonon line
    double s_value = 0.0;       // seconds
};

PhiValue phi(Time t, const CouplingSet& couplings);

// Real part only; the |P|^2 integrand never needs the imaginary part.
double phi_real_part(Time t, const CouplingSet& couplings);

// Same propagator through the coth identity,
//   Phi(t) = sum_m (g_m/omega_m)^2 { coth(hbar omega_m / 2 k_B T) [cos(omega_m t) - 1]
//                                    - i sin(omega_m t) },
// valid for T > 0 only. Matches phi() when the coupling set was built at T.
PhiValue phi_coth_form(Time t, const CouplingSet& couplings, Temperature T);

CoherenceSample coherence(Time t, const CouplingSet& couplings);

// One-sided cosine transform of the decaying coherence on a detuning grid.
std::vector<SpectrumSample> spectrum(const CouplingSet& couplings, Rate gamma,
                                     std::span<const AngularFrequency> detuning_grid,
                                     const QuadratureConfig& cfg = {});

}  // namespace phonon
