#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "phonon/coupling.hpp"
#include "support.hpp"

using namespace phonon;

TEST_CASE("occupation against direct evaluation") {
    // fundamental flexural mode at 4 K; cross-check with the coupling tables:
    // theta_sq / (4 eta_sq) = 5.11e8 / (4 * 14.0) = 9.13e6
    const double n = occupation(AngularFrequency{5.7177e4}, kelvin(4.0));
    CHECK(n == doctest::Approx(9.159e6).epsilon(1e-3));
    CHECK(n == doctest::Approx(9.125e6).epsilon(0.006));
}

TEST_CASE("occupation zero-temperature and analytic points") {
    CHECK(occupation(AngularFrequency{1e3}, kelvin(0.0)) == 0.0);
    CHECK(occupation(AngularFrequency{1e12}, kelvin(0.0)) == 0.0);
    // hbar omega / k_B T = ln 2  =>  N = 1
    const AngularFrequency w{std::log(2.0) * constants::k_B / constants::hbar};
    CHECK(occupation(w, kelvin(1.0)) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_THROWS_AS(occupation(AngularFrequency{0.0}, kelvin(1.0)), std::invalid_argument);
    CHECK_THROWS_AS(occupation(AngularFrequency{1.0}, kelvin(-1.0)), std::invalid_argument);
}

TEST_CASE("occupation classical asymptote for small hbar omega / k_B T") {
    // N -> k_B T / (hbar omega) - 1/2 with relative deviation below 1e-3
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> omega_exp(3.0, 7.5);
    for (int i = 0; i < 100; ++i) {
        const AngularFrequency w{std::pow(10.0, omega_exp(rng))};
        const Temperature t = kelvin(4.0);
        const double x = thermal_ratio(w, t);
        REQUIRE(x < 1e-3);
        const double n = occupation(w, t);
        CHECK(n >= 0.0);
        CHECK(std::abs(n - 1.0 / x + 0.5) < 1e-3 * n);
    }
}

TEST_CASE("eta_squared against tabulated values") {
    // F1: g/2pi = 34.19 kHz, Omega/2pi = 0.0091 MHz
    const double f1 = eta_squared(to_angular(kilohertz(34.19)), to_angular(megahertz(0.0091)));
    CHECK(f1 == doctest::Approx(14.116).epsilon(1e-4));
    CHECK(f1 == doctest::Approx(14.0).epsilon(0.03));
    // L2: g/2pi = 241.79 kHz, Omega/2pi = 4.49 MHz
    const double l2 = eta_squared(to_angular(kilohertz(241.79)), to_angular(megahertz(4.49)));
    CHECK(l2 == doctest::Approx(2.90e-3).epsilon(0.03));
    CHECK(eta_squared(AngularFrequency{0.0}, AngularFrequency{1e6}) == 0.0);
    CHECK_THROWS_AS(eta_squared(AngularFrequency{1.0}, AngularFrequency{0.0}),
                    std::invalid_argument);
}

TEST_CASE("theta_squared") {
    CHECK(theta_squared(14.0, 9.125e6) == 5.11e8);
    CHECK(theta_squared(123.0, 0.0) == 0.0);
    // L2 at 4 K
    const double n = occupation(to_angular(megahertz(4.49)), kelvin(4.0));
    CHECK(n == doctest::Approx(1.856e4).epsilon(1e-3));
    CHECK(theta_squared(2.90e-3, n) == doctest::Approx(2.15e2).epsilon(0.03));
    CHECK_THROWS_AS(theta_squared(-1.0, 1.0), std::invalid_argument);
}

TEST_CASE("coupling_from_strain") {
    const auto potentials = DeformationPotentials::ingaas_qd();
    CHECK(potentials.hydrostatic.value() == doctest::Approx(-7.5 * constants::eV));
    CHECK(potentials.shear.value() == doctest::Approx(-1.9 * constants::eV));

    SUBCASE("zero strain derivatives give zero coupling") {
        CHECK(coupling_from_strain(StrainDerivatives{}, potentials, femtometers(70.9)).value() ==
              0.0);
    }
    SUBCASE("zero potentials give zero coupling regardless of strain") {
        const DeformationPotentials zero{Energy{0.0}, Energy{0.0}};
        CHECK(coupling_from_strain(StrainDerivatives{1e9, -3e9}, zero, femtometers(1.0)).value() ==
              0.0);
    }
    SUBCASE("algebraic inversion recovers the tabulated F1 coupling") {
        // pure hydrostatic strain chosen so that g comes out at 2 pi * 34.19 kHz
        const double g_target = two_pi * 34.19e3;
        const Length u_zpf = femtometers(70.9);
        const StrainDerivatives strain{
            constants::hbar * g_target / (std::abs(potentials.hydrostatic.value()) *
                                          u_zpf.value()),
            0.0};
        const auto g = coupling_from_strain(strain, potentials, u_zpf);
        CHECK(g.value() == doctest::Approx(g_target).epsilon(1e-12));
    }
    SUBCASE("sign is discarded") {
        const StrainDerivatives strain{1e6, 0.0};
        CHECK(coupling_from_strain(strain, potentials, femtometers(1.0)).value() > 0.0);
    }
    CHECK_THROWS_AS(coupling_from_strain(StrainDerivatives{}, potentials, Length{0.0}),
                    std::invalid_argument);
}

TEST_CASE("effective_mass") {
    SUBCASE("uniform displacement integrates the full mass") {
        std::vector<DensitySample> samples(10, DensitySample{5316.0, 1.0, 1e-19});
        CHECK(effective_mass(samples).value() == doctest::Approx(5.316e-15).epsilon(1e-12));
    }
    SUBCASE("half displaced, half at rest") {
        std::vector<DensitySample> samples;
        for (int i = 0; i < 5; ++i) samples.push_back({5316.0, 1.0, 2e-19});
        for (int i = 0; i < 5; ++i) samples.push_back({5316.0, 0.0, 2e-19});
        CHECK(effective_mass(samples).value() ==
              doctest::Approx(0.5 * 5316.0 * 2e-18).epsilon(1e-12));
    }
    SUBCASE("empty sample list yields zero with a warning") {
        CHECK(effective_mass({}).value() == 0.0);
    }
    SUBCASE("displacement above 1 violates the normalization contract") {
        std::vector<DensitySample> samples{{5316.0, 1.2, 1e-19}};
        CHECK_THROWS_AS(effective_mass(samples), std::invalid_argument);
    }
}

TEST_CASE("build_coupling_set positions") {
    const auto with_dbr = testsupport::load_catalog("modes_with_dbr.csv", "with_dbr");
    const auto no_dbr = testsupport::load_catalog("modes_no_dbr.csv", "no_dbr");

    SUBCASE("on axis only longitudinal modes couple") {
        const auto set = build_coupling_set(with_dbr, kelvin(4.0), QdPosition::OnAxis);
        REQUIRE(set.size() == 61);
        int coupled = 0;
        for (const auto& e : set.entries()) {
            if (e.theta_sq > 0.0) {
                ++coupled;
                CHECK(e.family == ModeFamily::Longitudinal);
            }
        }
        CHECK(coupled == 21);
        const auto l2 = std::find_if(set.entries().begin(), set.entries().end(), [](const auto& e) {
            return e.family == ModeFamily::Longitudinal && e.index == 2;
        });
        REQUIRE(l2 != set.entries().end());
        CHECK(l2->theta_sq == doctest::Approx(2.15e2).epsilon(0.03));
    }

    SUBCASE("zero temperature keeps eta_sq and zeroes theta_sq") {
        const auto set = build_coupling_set(no_dbr, kelvin(0.0), QdPosition::OnSidewall);
        for (const auto& e : set.entries()) {
            CHECK(e.theta_sq == 0.0);
            CHECK(e.occupation == 0.0);
        }
        const auto& f1 = set.entries()[0];
        CHECK(f1.eta_sq == doctest::Approx(14.116).epsilon(1e-3));
    }

    SUBCASE("on sidewall the fundamental flexural coupling matches the tables") {
        const auto set = build_coupling_set(no_dbr, kelvin(4.0), QdPosition::OnSidewall);
        const auto& f1 = set.entries()[0];
        CHECK(f1.family == ModeFamily::Flexural);
        CHECK(f1.index == 1);
        CHECK(f1.theta_sq == doctest::Approx(5.11e8).epsilon(0.03));
    }

    SUBCASE("torsional modes never couple") {
        std::istringstream in(
            "family,index,freq_mhz,m_eff_pg,u_zpf_fm,g_max_khz\n"
            "T,1,5.0,100,,250.0\n"
            "F,1,0.0091,182.6,70.9,34.19\n");
        const auto catalog = parse_mode_table(in, "synthetic");
        const auto set = build_coupling_set(catalog, kelvin(4.0), QdPosition::OnSidewall);
        const auto torsional =
            std::find_if(set.entries().begin(), set.entries().end(),
                         [](const auto& e) { return e.family == ModeFamily::Torsional; });
        REQUIRE(torsional != set.entries().end());
        CHECK(torsional->eta_sq == 0.0);
        CHECK(torsional->theta_sq == 0.0);
    }
}

TEST_CASE("coupling set invariants") {
    const auto catalog = testsupport::load_catalog("modes_no_dbr.csv", "no_dbr");

    SUBCASE("theta_sq = 4 eta_sq N exactly, entries in canonical order") {
        const auto set = build_coupling_set(catalog, kelvin(4.0), QdPosition::OnSidewall);
        for (std::size_t i = 0; i < set.size(); ++i) {
            const auto& e = set.entries()[i];
            CHECK(e.theta_sq == 4.0 * e.eta_sq * e.occupation);
            if (i > 0) {
                const auto& prev = set.entries()[i - 1];
                CHECK(std::pair(prev.family, prev.index) < std::pair(e.family, e.index));
            }
        }
    }

    SUBCASE("theta_sq strictly increases with temperature") {
        const auto cold = build_coupling_set(catalog, kelvin(2.0), QdPosition::OnSidewall);
        const auto warm = build_coupling_set(catalog, kelvin(4.0), QdPosition::OnSidewall);
        for (std::size_t i = 0; i < cold.size(); ++i) {
            if (cold.entries()[i].eta_sq > 0.0) {
                CHECK(warm.entries()[i].theta_sq > cold.entries()[i].theta_sq);
            }
        }
    }

    SUBCASE("construction rejects inconsistent weights and disorder") {
        std::vector<CouplingEntry> bad{{ModeFamily::Flexural, 1, AngularFrequency{1e6}, 1.0, 3.9,
                                        1.0}};
        CHECK_THROWS_AS(CouplingSet(kelvin(1.0), std::move(bad)), std::invalid_argument);

        std::vector<CouplingEntry> disordered{
            make_coupling_entry(ModeFamily::Longitudinal, 1, AngularFrequency{1e6}, 1.0, 1.0),
            make_coupling_entry(ModeFamily::Flexural, 1, AngularFrequency{1e6}, 1.0, 1.0)};
        CHECK_THROWS_AS(CouplingSet(kelvin(1.0), std::move(disordered)), std::invalid_argument);
    }

    SUBCASE("collapse statistics") {
        const auto set = build_coupling_set(catalog, kelvin(4.0), QdPosition::OnAxis);
        double expected = 0.0;
        double max_omega = 0.0;
        for (const auto& e : set.entries()) {
            expected += e.theta_sq * e.omega.value() * e.omega.value();
            if (e.eta_sq > 0.0) max_omega = std::max(max_omega, e.omega.value());
        }
        CHECK(set.theta_omega_sq_sum() == doctest::Approx(expected).epsilon(1e-12));
        CHECK(set.max_coupled_omega().value() == max_omega);
        CHECK(set.has_coupled_modes());
    }
}
