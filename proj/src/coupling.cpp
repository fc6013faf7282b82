#include "phonon/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <stdexcept>
#include <utility>

#include "phonon/numerics.hpp"

namespace phonon {

CouplingEntry make_coupling_entry(ModeFamily family, int index, AngularFrequency omega,
                                  double eta_sq, double occupation) {
    if (eta_sq < 0.0 || occupation < 0.0) {
        throw std::invalid_argument("coupling entry: eta_sq and occupation must be non-negative");
    }
    return CouplingEntry{family, index, omega, eta_sq, theta_squared(eta_sq, occupation),
                         occupation};
}

CouplingSet::CouplingSet(Temperature temperature, std::vector<CouplingEntry> entries)
    : temperature_(temperature), entries_(std::move(entries)) {
    if (temperature_.value() < 0.0) {
        throw std::invalid_argument("coupling set: temperature must be non-negative");
    }
    const auto key = [](const CouplingEntry& e) { return std::pair(e.family, e.index); };
    KahanAccumulator collapse;
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        const CouplingEntry& e = entries_[i];
        if (!(e.omega.value() > 0.0)) {
            throw std::invalid_argument("coupling set: omega must be positive");
        }
        if (e.eta_sq < 0.0 || e.occupation < 0.0) {
            throw std::invalid_argument("coupling set: weights must be non-negative");
        }
        if (e.theta_sq != theta_squared(e.eta_sq, e.occupation)) {
            throw std::invalid_argument("coupling set: theta_sq must equal 4 eta_sq N");
        }
        if (i > 0 && !(key(entries_[i - 1]) < key(e))) {
            throw std::invalid_argument("coupling set: entries must be in canonical order");
        }
        collapse.add(e.theta_sq * e.omega.value() * e.omega.value());
        if ((e.eta_sq > 0.0 || e.theta_sq > 0.0) && e.omega > max_coupled_omega_) {
            max_coupled_omega_ = e.omega;
        }
    }
    theta_omega_sq_sum_ = collapse.sum();
}

double occupation(AngularFrequency omega, Temperature T) {
    if (!(omega.value() > 0.0)) {
        throw std::invalid_argument("occupation: omega must be positive");
    }
    if (T.value() < 0.0) {
        throw std::invalid_argument("occupation: temperature must be non-negative");
    }
    if (T.value() == 0.0) {
        return 0.0;
    }
    return 1.0 / std::expm1(thermal_ratio(omega, T));
}

double eta_squared(AngularFrequency g, AngularFrequency omega) {
    if (!(omega.value() > 0.0)) {
        throw std::invalid_argument("eta_squared: omega must be positive");
    }
    if (g.value() < 0.0) {
        throw std::invalid_argument("eta_squared: coupling must be non-negative");
    }
    const double ratio = g / omega;
    return ratio * ratio;
}

double theta_squared(double eta_sq, double occupation) {
    if (eta_sq < 0.0 || occupation < 0.0) {
        throw std::invalid_argument("theta_squared: arguments must be non-negative");
    }
    return 4.0 * eta_sq * occupation;
}

AngularFrequency coupling_from_strain(const StrainDerivatives& strain,
                                      const DeformationPotentials& potentials, Length u_zpf) {
    if (!(u_zpf.value() > 0.0)) {
        throw std::invalid_argument("coupling_from_strain: u_zpf must be positive");
    }
    const double shift_per_displacement =
        potentials.hydrostatic.value() * strain.hydrostatic_per_m +
        0.5 * potentials.shear.value() * strain.shear_per_m;
    return AngularFrequency{std::abs(shift_per_displacement) * u_zpf.value() / constants::hbar};
}

Mass effective_mass(std::span<const DensitySample> samples) {
    if (samples.empty()) {
        std::cerr << "effective_mass: empty sample list, returning 0 kg\n";
        return Mass{0.0};
    }
    KahanAccumulator sum;
    for (const DensitySample& s : samples) {
        if (s.normalized_displacement < 0.0 || s.normalized_displacement > 1.0) {
            throw std::invalid_argument(
                "effective_mass: normalized displacement must lie in [0, 1]");
        }
        if (!(s.cell_volume_m3 > 0.0)) {
            throw std::invalid_argument("effective_mass: cell volume must be positive");
        }
        sum.add(s.density_kg_m3 * s.normalized_displacement * s.normalized_displacement *
                s.cell_volume_m3);
    }
    return Mass{sum.sum()};
}

CouplingSet build_coupling_set(const ModeCatalog& catalog, Temperature T, QdPosition position) {
    std::vector<CouplingEntry> entries;
    entries.reserve(catalog.size());
    for (const ModeRecord& r : catalog.records()) {
        AngularFrequency g = r.g_max;
        switch (r.family) {
            case ModeFamily::Flexural:
                // no displacement on the neutral axis
                if (position == QdPosition::OnAxis) g = AngularFrequency{0.0};
                break;
            case ModeFamily::Longitudinal:
                // tabulated on-axis coupling is used at both positions
                break;
            case ModeFamily::Torsional:
                g = AngularFrequency{0.0};
                break;
        }
        entries.push_back(make_coupling_entry(r.family, r.index, r.omega, eta_squared(g, r.omega),
                                              occupation(r.omega, T)));
    }
    return CouplingSet(T, std::move(entries));
}

}  // namespace phonon
