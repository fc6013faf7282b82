// units.hpp — dimension-tagged scalar quantities and exact physical constants.
//
// Every formula downstream works in SI with angular frequency in rad/s.
// Table units (MHz, kHz, pg, fm) are converted exactly once, at ingestion,
// through the factory helpers below.

#pragma once

#include <cmath>
#include <compare>
#include <numbers>
#include <stdexcept>

namespace phonon {

// Requested a T -> 0 limit through a formula that is undefined there.
// Callers must switch to the dedicated zero-temperature branch instead.
class ZeroTemperatureError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

enum class Dim {
    AngularFrequency,  // rad/s
    Frequency,         // Hz
    Mass,              // kg
    Length,            // m
    Energy,            // J
    Temperature,       // K
    Time,              // s
    Rate,              // 1/s
    Dimensionless,
};

// A double tagged with its physical dimension. Arithmetic is only defined
// between quantities of the same dimension; mixed-dimension expressions do
// not compile. Construction and arithmetic reject non-finite values.
template <Dim D>
class Quantity {
public:
    constexpr Quantity() = default;

    explicit Quantity(double v) : value_(v) {
        if (!std::isfinite(v)) {
            throw std::domain_error("quantity must be finite");
        }
    }

    [[nodiscard]] double value() const { return value_; }

    friend Quantity operator+(Quantity a, Quantity b) { return Quantity{a.value_ + b.value_}; }
    friend Quantity operator-(Quantity a, Quantity b) { return Quantity{a.value_ - b.value_}; }
    friend Quantity operator-(Quantity a) { return Quantity{-a.value_}; }
    friend Quantity operator*(Quantity a, double s) { return Quantity{a.value_ * s}; }
    friend Quantity operator*(double s, Quantity a) { return Quantity{s * a.value_}; }
    friend Quantity operator/(Quantity a, double s) { return Quantity{a.value_ / s}; }

    // ratio of like quantities is dimensionless
    friend double operator/(Quantity a, Quantity b) { return a.value_ / b.value_; }

    friend auto operator<=>(Quantity a, Quantity b) = default;

private:
    double value_ = 0.0;
};

using AngularFrequency = Quantity<Dim::AngularFrequency>;
using Frequency = Quantity<Dim::Frequency>;
using Mass = Quantity<Dim::Mass>;
using Length = Quantity<Dim::Length>;
using Energy = Quantity<Dim::Energy>;
using Temperature = Quantity<Dim::Temperature>;
using Time = Quantity<Dim::Time>;
using Rate = Quantity<Dim::Rate>;

namespace constants {
// CODATA exact values, SI.
inline constexpr double hbar = 1.054571817e-34;  // J s
inline constexpr double k_B = 1.380649e-23;      // J/K
inline constexpr double eV = 1.602176634e-19;    // J
}  // namespace constants

inline constexpr double two_pi = 2.0 * std::numbers::pi;

// --- ingestion-time unit factories ---------------------------------------

inline Frequency megahertz(double f) { return Frequency{f * 1e6}; }
inline Frequency kilohertz(double f) { return Frequency{f * 1e3}; }
inline Mass picograms(double m) { return Mass{m * 1e-15}; }
inline Length femtometers(double x) { return Length{x * 1e-15}; }
inline Temperature kelvin(double t) { return Temperature{t}; }
inline Time seconds(double t) { return Time{t}; }
inline Rate per_second(double r) { return Rate{r}; }
inline AngularFrequency rad_per_second(double w) { return AngularFrequency{w}; }
inline Energy electron_volts(double e) { return Energy{e * constants::eV}; }

// --- conversions and thermal ratio ----------------------------------------

inline AngularFrequency to_angular(Frequency f) {
    if (f.value() < 0.0) {
        throw std::invalid_argument("to_angular: negative frequency");
    }
    return AngularFrequency{two_pi * f.value()};
}

inline Frequency to_ordinary(AngularFrequency w) {
    if (w.value() < 0.0) {
        throw std::invalid_argument("to_ordinary: negative angular frequency");
    }
    return Frequency{w.value() / two_pi};
}

// hbar*omega / (k_B * T)
inline double thermal_ratio(AngularFrequency omega, Temperature T) {
    if (omega.value() <= 0.0) {
        throw std::invalid_argument("thermal_ratio: omega must be positive");
    }
    if (T.value() <= 0.0) {
        throw ZeroTemperatureError("thermal_ratio: zero-temperature limit requested");
    }
    return constants::hbar * omega.value() / (constants::k_B * T.value());
}

}  // namespace phonon
