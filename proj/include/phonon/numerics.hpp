// numerics.hpp — compensated summation and the adaptive quadrature engine.
//
// The integrator is a Gauss-Kronrod 7/15 panel scheme with a worst-first
// refinement queue. Panel widths are capped from the start so that an
// integrand whose mass sits in a narrow collapse shoulder cannot be missed
// by a coarse first pass. All operations are deterministic: panels are
// refined in a fixed order and the final sum runs over panels sorted by
// position with compensated accumulation.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <future>
#include <limits>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace phonon {

class KahanAccumulator {
public:
    void add(double x) {
        const double y = x - compensation_;
        const double t = sum_ + y;
        compensation_ = (t - sum_) - y;
        sum_ = t;
    }

    [[nodiscard]] double sum() const { return sum_; }

private:
    double sum_ = 0.0;
    double compensation_ = 0.0;
};

// Controls for the semi-infinite coherence integrals.
struct QuadratureConfig {
    double rel_tol = 1e-8;
    // truncation point: exp(-gamma * t_max) = envelope_cutoff
    double envelope_cutoff = 1e-12;
    // largest panel width as a fraction of the shortest resolved timescale
    double max_step_fraction = 1.0 / 32.0;
    int max_depth = 40;
    std::size_t max_panels = std::size_t{1} << 22;

    void validate() const {
        if (!(rel_tol > 0.0) || !(rel_tol < 1.0)) {
            throw std::invalid_argument("QuadratureConfig: rel_tol must be in (0, 1)");
        }
        if (!(envelope_cutoff > 0.0) || !(envelope_cutoff < 1.0)) {
            throw std::invalid_argument("QuadratureConfig: envelope_cutoff must be in (0, 1)");
        }
        if (!(max_step_fraction > 0.0)) {
            throw std::invalid_argument("QuadratureConfig: max_step_fraction must be positive");
        }
        if (max_depth < 1 || max_panels < 1) {
            throw std::invalid_argument("QuadratureConfig: depth and panel budget must be positive");
        }
    }
};

struct QuadratureOutcome {
    double value = 0.0;
    double error_bound = 0.0;
    std::size_t panels = 0;
    std::size_t evaluations = 0;
};

// Refinement did not converge within the configured budget. Carries the
// partial estimate and its error bound.
class QuadratureError : public std::runtime_error {
public:
    QuadratureError(const std::string& msg, double partial_estimate, double error_bound)
        : std::runtime_error(msg), partial_estimate_(partial_estimate), error_bound_(error_bound) {}

    [[nodiscard]] double partial_estimate() const { return partial_estimate_; }
    [[nodiscard]] double error_bound() const { return error_bound_; }

private:
    double partial_estimate_;
    double error_bound_;
};

namespace detail {

// Kronrod-15 abscissae (positive half, descending) and weights; the odd
// entries are the embedded Gauss-7 nodes.
inline constexpr std::array<double, 8> kGkNodes = {
    0.9914553711208126, 0.9491079123427585, 0.8648644233597691, 0.7415311855993945,
    0.5860872354676911, 0.4058451513773972, 0.2077849550078985, 0.0,
};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.0229353220105292, 0.0630920926299786, 0.1047900103222502, 0.1406532597155259,
    0.1690047266392679, 0.1903505780647854, 0.2044329400752989, 0.2094821410847278,
};
inline constexpr std::array<double, 4> kGaussWeights = {
    0.1294849661688697, 0.2797053914892767, 0.3818300505051189, 0.4179591836734694,
};

struct Panel {
    double a = 0.0;
    double b = 0.0;
    double value = 0.0;
    double error = 0.0;
    int depth = 0;
};

// worst-first ordering with a positional tie-break for determinism
struct PanelPriority {
    bool operator()(const Panel& lhs, const Panel& rhs) const {
        if (lhs.error != rhs.error) return lhs.error < rhs.error;
        return lhs.a > rhs.a;
    }
};

template <class F>
Panel gk15(F& f, double a, double b, int depth) {
    const double center = 0.5 * (a + b);
    const double halfwidth = 0.5 * (b - a);
    const double fc = f(center);
    double kronrod = kKronrodWeights[7] * fc;
    double gauss = kGaussWeights[3] * fc;
    for (int j = 0; j < 7; ++j) {
        const double dx = halfwidth * kGkNodes[j];
        const double lo = f(center - dx);
        const double hi = f(center + dx);
        kronrod += kKronrodWeights[j] * (lo + hi);
        if (j % 2 == 1) gauss += kGaussWeights[(j - 1) / 2] * (lo + hi);
    }
    return Panel{a, b, kronrod * halfwidth, std::abs((kronrod - gauss) * halfwidth), depth};
}

inline QuadratureOutcome finalize(std::vector<Panel>& panels, std::size_t evaluations) {
    std::sort(panels.begin(), panels.end(),
              [](const Panel& x, const Panel& y) { return x.a < y.a; });
    KahanAccumulator value;
    KahanAccumulator error;
    for (const Panel& p : panels) {
        value.add(p.value);
        error.add(p.error);
    }
    return QuadratureOutcome{value.sum(), error.sum(), panels.size(), evaluations};
}

}  // namespace detail

// Adaptive GK15 over [a, b]. No initial panel is wider than max_panel_width;
// refinement stops once the summed error estimate falls below
// max(rel_tol * |value|, abs_tol).
template <class F>
QuadratureOutcome integrate_adaptive(F&& f, double a, double b, double rel_tol,
                                     double max_panel_width, int max_depth,
                                     std::size_t max_panels, double abs_tol = 0.0) {
    using detail::Panel;
    if (!(b > a)) {
        throw std::invalid_argument("integrate_adaptive: empty interval");
    }
    const auto initial = static_cast<std::size_t>(std::ceil((b - a) / max_panel_width));
    if (initial > max_panels) {
        throw QuadratureError("integrate_adaptive: initial subdivision exceeds panel budget",
                              0.0, std::numeric_limits<double>::infinity());
    }

    std::vector<Panel> heap;
    heap.reserve(initial + 64);
    double total_value = 0.0;
    double total_error = 0.0;
    std::size_t evaluations = 0;
    const double width = (b - a) / static_cast<double>(initial);
    for (std::size_t i = 0; i < initial; ++i) {
        const double lo = a + width * static_cast<double>(i);
        const double hi = (i + 1 == initial) ? b : a + width * static_cast<double>(i + 1);
        Panel p = detail::gk15(f, lo, hi, 0);
        evaluations += 15;
        total_value += p.value;
        total_error += p.error;
        heap.push_back(p);
    }
    std::make_heap(heap.begin(), heap.end(), detail::PanelPriority{});

    const auto tolerance = [&] { return std::max(rel_tol * std::abs(total_value), abs_tol); };
    while (total_error > tolerance()) {
        std::pop_heap(heap.begin(), heap.end(), detail::PanelPriority{});
        const Panel worst = heap.back();
        heap.pop_back();
        if (worst.depth >= max_depth) {
            auto partial = detail::finalize(heap, evaluations);
            throw QuadratureError("integrate_adaptive: refinement exceeded max depth",
                                  partial.value + worst.value, partial.error_bound + worst.error);
        }
        if (heap.size() + 2 > max_panels) {
            auto partial = detail::finalize(heap, evaluations);
            throw QuadratureError("integrate_adaptive: panel budget exhausted",
                                  partial.value + worst.value, partial.error_bound + worst.error);
        }
        const double mid = 0.5 * (worst.a + worst.b);
        Panel left = detail::gk15(f, worst.a, mid, worst.depth + 1);
        Panel right = detail::gk15(f, mid, worst.b, worst.depth + 1);
        evaluations += 30;
        total_value += left.value + right.value - worst.value;
        total_error += left.error + right.error - worst.error;
        heap.push_back(left);
        std::push_heap(heap.begin(), heap.end(), detail::PanelPriority{});
        heap.push_back(right);
        std::push_heap(heap.begin(), heap.end(), detail::PanelPriority{});
    }
    return detail::finalize(heap, evaluations);
}

// Composite (non-adaptive) GK15 with the same panel-width cap. Used where the
// width cap already resolves every feature and only an error report is needed.
template <class F>
QuadratureOutcome integrate_composite(F&& f, double a, double b, double max_panel_width,
                                      std::size_t max_panels) {
    if (!(b > a)) {
        throw std::invalid_argument("integrate_composite: empty interval");
    }
    const auto n = static_cast<std::size_t>(std::ceil((b - a) / max_panel_width));
    if (n > max_panels) {
        throw QuadratureError("integrate_composite: panel budget exceeded", 0.0,
                              std::numeric_limits<double>::infinity());
    }
    const double width = (b - a) / static_cast<double>(n);
    KahanAccumulator value;
    KahanAccumulator error;
    for (std::size_t i = 0; i < n; ++i) {
        const double lo = a + width * static_cast<double>(i);
        const double hi = (i + 1 == n) ? b : a + width * static_cast<double>(i + 1);
        const detail::Panel p = detail::gk15(f, lo, hi, 0);
        value.add(p.value);
        error.add(p.error);
    }
    return QuadratureOutcome{value.sum(), error.sum(), n, n * 15};
}

namespace detail {

// Runs fn(begin, end) over contiguous chunks of [0, n), possibly on several
// threads. Each index is handled exactly once, so writes to per-index slots
// are race-free and results do not depend on the schedule.
inline void parallel_chunks(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn) {
    if (n == 0) return;
    const std::size_t hw = std::max<std::size_t>(1, std::thread::hardware_concurrency());
    const std::size_t workers = std::min(hw, n);
    if (workers == 1) {
        fn(0, n);
        return;
    }
    std::vector<std::future<void>> futures;
    futures.reserve(workers);
    const std::size_t chunk = (n + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t begin = w * chunk;
        const std::size_t end = std::min(n, begin + chunk);
        if (begin >= end) break;
        futures.push_back(std::async(std::launch::async, fn, begin, end));
    }
    for (auto& fut : futures) fut.get();
}

}  // namespace detail

}  // namespace phonon
