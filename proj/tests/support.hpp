// support.hpp — shared test helpers: fixture loading, temp files, and the
// dense fixed-step trapezoid oracle used to check the adaptive quadrature.

#pragma once

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "phonon/coupling.hpp"
#include "phonon/indistinguishability.hpp"
#include "phonon/mode_catalog.hpp"

namespace testsupport {

inline std::string fixtures_dir() {
    if (const char* env = std::getenv("PHONON_FIXTURES_DIR")) {
        return env;
    }
#ifdef PHONON_DATA_DIR
    return PHONON_DATA_DIR;
#else
    return "data";
#endif
}

inline std::string fixture_path(const std::string& name) { return fixtures_dir() + "/" + name; }

inline phonon::ModeCatalog load_catalog(const std::string& name, const std::string& label) {
    std::ifstream in(fixture_path(name));
    REQUIRE(in.good());
    return phonon::parse_mode_table(in, label);
}

inline phonon::ReferenceCouplingTable load_reference(const std::string& name) {
    std::ifstream in(fixture_path(name));
    REQUIRE(in.good());
    return phonon::parse_reference_couplings(in);
}

inline std::filesystem::path temp_path(const std::string& stem) {
    static int counter = 0;
    return std::filesystem::temp_directory_path() /
           (stem + "." + std::to_string(::getpid()) + "." + std::to_string(counter++));
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// One-scale summary of the integrand: the smallest of the decay envelope,
// the fastest coupled mode period, and the Gaussian collapse time.
inline double finest_timescale(const phonon::CouplingSet& couplings, double gamma) {
    double finest = 1.0 / gamma;
    if (couplings.has_coupled_modes()) {
        finest = std::min(finest, phonon::two_pi / couplings.max_coupled_omega().value());
        const double collapse_sq = couplings.theta_omega_sq_sum();
        if (collapse_sq > 0.0) {
            finest = std::min(finest, 2.0 / std::sqrt(collapse_sq));
        }
    }
    return finest;
}

// Dense fixed-step trapezoid evaluation of
//   I = Gamma int_0^tmax e^{-Gamma t} |P(t)|^2 dt
// with its own plain mode sum, independent of the propagator and quadrature
// implementations it serves as an oracle for.
inline double indistinguishability_trapezoid(const phonon::CouplingSet& couplings, double gamma,
                                             double steps_per_scale = 1000.0,
                                             double envelope_cutoff = 1e-12) {
    const double t_max = -std::log(envelope_cutoff) / gamma;
    const double step = finest_timescale(couplings, gamma) / steps_per_scale;
    const auto n = static_cast<std::size_t>(std::ceil(t_max / step));

    const auto integrand = [&](double t) {
        double exponent = -gamma * t;
        for (const auto& e : couplings.entries()) {
            const double s = std::sin(0.5 * e.omega.value() * t);
            exponent -= 2.0 * (e.theta_sq + 2.0 * e.eta_sq) * s * s;
        }
        return gamma * std::exp(exponent);
    };

    double sum = 0.5 * (integrand(0.0) + integrand(t_max));
    for (std::size_t i = 1; i < n; ++i) {
        sum += integrand(t_max * static_cast<double>(i) / static_cast<double>(n));
    }
    return sum * t_max / static_cast<double>(n);
}

}  // namespace testsupport
