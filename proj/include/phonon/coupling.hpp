// coupling.hpp — per-mode thermal coupling parameters.
//
// For every mode m the dephasing weights are
//   eta_sq   = (g_m / omega_m)^2        phonon emission at zero temperature
//   N        = 1 / (exp(hbar omega_m / k_B T) - 1)   Bose-Einstein occupation
//   theta_sq = 4 eta_sq N               thermally induced absorption
// assembled into an immutable CouplingSet in catalog canonical order.

#pragma once

#include <span>
#include <vector>

#include "phonon/mode_catalog.hpp"
#include "phonon/units.hpp"

namespace phonon {

// Emitter location on the beam-waist cross-section. Flexural modes displace
// the sidewall and leave the neutral axis at rest, so they only couple to an
// off-axis emitter; longitudinal modes reach their strain maximum on the axis.
enum class QdPosition { OnAxis, OnSidewall };

struct DeformationPotentials {
    Energy hydrostatic;  // a
    Energy shear;        // b

    // In(0.5)Ga(0.5)As interpolated values: a = -7.5 eV, b = -1.9 eV
    static DeformationPotentials ingaas_qd() {
        return DeformationPotentials{electron_volts(-7.5), electron_volts(-1.9)};
    }
};

// Derivatives of the strain invariants at the emitter with respect to the
// mode displacement: hydrostatic e_h = e_xx + e_yy + e_zz and tetragonal
// shear e_sh = 2 e_zz - e_xx - e_yy.
struct StrainDerivatives {
    double hydrostatic_per_m = 0.0;  // d e_h / du
    double shear_per_m = 0.0;        // d e_sh / du
};

struct DensitySample {
    double density_kg_m3 = 0.0;
    double normalized_displacement = 0.0;  // |u(r)| / max |u|, in [0, 1]
    double cell_volume_m3 = 0.0;
};

struct CouplingEntry {
    ModeFamily family = ModeFamily::Flexural;
    int index = 1;
    AngularFrequency omega;
    double eta_sq = 0.0;
    double theta_sq = 0.0;
    double occupation = 0.0;
};

// Builds an entry whose theta_sq satisfies theta_sq = 4 eta_sq N by construction.
CouplingEntry make_coupling_entry(ModeFamily family, int index, AngularFrequency omega,
                                  double eta_sq, double occupation);

// Immutable per-mode coupling collection at one temperature, in catalog
// canonical order.
class CouplingSet {
public:
    CouplingSet(Temperature temperature, std::vector<CouplingEntry> entries);

    [[nodiscard]] Temperature temperature() const { return temperature_; }
    [[nodiscard]] std::span<const CouplingEntry> entries() const { return entries_; }
    [[nodiscard]] std::size_t size() const { return entries_.size(); }

    // sum over modes of theta_sq * omega^2; sets the coherence collapse rate
    [[nodiscard]] double theta_omega_sq_sum() const { return theta_omega_sq_sum_; }
    // largest omega among entries with nonzero coupling (0 when none couple)
    [[nodiscard]] AngularFrequency max_coupled_omega() const { return max_coupled_omega_; }
    [[nodiscard]] bool has_coupled_modes() const { return max_coupled_omega_.value() > 0.0; }

private:
    Temperature temperature_;
    std::vector<CouplingEntry> entries_;
    double theta_omega_sq_sum_ = 0.0;
    AngularFrequency max_coupled_omega_;
};

// Bose-Einstein occupation. T = 0 returns exactly 0; small hbar*omega/k_B*T
// is evaluated through expm1 so the fundamental modes keep full precision.
double occupation(AngularFrequency omega, Temperature T);

double eta_squared(AngularFrequency g, AngularFrequency omega);

double theta_squared(double eta_sq, double occupation);

// |a * de_h/du + (b/2) * de_sh/du| * u_zpf / hbar, in rad/s. The sign is
// discarded: only g^2 enters the dephasing weights.
AngularFrequency coupling_from_strain(const StrainDerivatives& strain,
                                      const DeformationPotentials& potentials, Length u_zpf);

// Discretized volume integral m_eff = sum rho |u|^2 V over the sample cells.
// An empty sample list yields 0 kg and a warning on stderr.
Mass effective_mass(std::span<const DensitySample> samples);

CouplingSet build_coupling_set(const ModeCatalog& catalog, Temperature T, QdPosition position);

}  // namespace phonon
