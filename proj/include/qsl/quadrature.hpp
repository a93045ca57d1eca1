#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <queue>
#include <string>
#include <vector>

#include "qsl/errors.hpp"

namespace qsl {

template <std::size_t N>
using QuadValue = std::array<double, N>;

template <std::size_t N>
struct QuadResult {
    QuadValue<N> value{};
    double error = 0.0;
    int evaluations = 0;
};

namespace detail {

inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851, 0.864864423359769072789712788640926,
    0.741531185599394439863864773280788, 0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204, 0.104790010322250183839876322541518,
    0.140653259715525918745189590510238, 0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss weights on the odd-indexed Kronrod nodes (1, 3, 5, 7).
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780, 0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

template <std::size_t N>
struct Panel {
    double a = 0.0;
    double b = 0.0;
    QuadValue<N> value{};
    double error = 0.0;

    bool operator<(const Panel& other) const { return error < other.error; }
};

template <std::size_t N, class F>
Panel<N> kronrod15(F& f, double a, double b)
{
    const double centre = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    QuadValue<N> kron{};
    QuadValue<N> gauss{};

    const QuadValue<N> mid = f(centre);
    for (std::size_t c = 0; c < N; ++c) {
        kron[c] = kKronrodWeights[7] * mid[c];
        gauss[c] = kGaussWeights[3] * mid[c];
    }
    for (int i = 0; i < 7; ++i) {
        const double dx = half * kKronrodNodes[i];
        const QuadValue<N> lo = f(centre - dx);
        const QuadValue<N> hi = f(centre + dx);
        for (std::size_t c = 0; c < N; ++c) {
            kron[c] += kKronrodWeights[i] * (lo[c] + hi[c]);
            if (i % 2 == 1)
                gauss[c] += kGaussWeights[i / 2] * (lo[c] + hi[c]);
        }
    }

    Panel<N> p{a, b, {}, 0.0};
    for (std::size_t c = 0; c < N; ++c) {
        p.value[c] = half * kron[c];
        p.error = std::max(p.error, std::abs(half * (kron[c] - gauss[c])));
    }
    return p;
}

} // namespace detail

/// Globally adaptive 7/15-point Gauss-Kronrod integration of a vector-valued
/// function. [a, b] is first cut into panels no wider than `seed_width`; the
/// panel with the largest |K15 - G7| is bisected until the summed estimate is
/// below `abs_tol` (componentwise maximum). Throws QuadratureFailure when the
/// evaluation budget runs out first.
template <std::size_t N, class F>
QuadResult<N> integrate_adaptive(F&& f, double a, double b, double abs_tol, int max_evals, double seed_width)
{
    QuadResult<N> out;
    if (b == a)
        return out;

    const double width = b - a;
    int pieces = 1;
    if (seed_width > 0.0 && std::isfinite(seed_width))
        pieces = std::max(1, static_cast<int>(std::ceil(std::abs(width) / seed_width - 1e-12)));

    std::priority_queue<detail::Panel<N>> queue;
    double total_error = 0.0;
    for (int k = 0; k < pieces; ++k) {
        const double lo = a + width * k / pieces;
        const double hi = k + 1 == pieces ? b : a + width * (k + 1) / pieces;
        auto p = detail::kronrod15<N>(f, lo, hi);
        out.evaluations += 15;
        total_error += p.error;
        queue.push(p);
    }

    while (total_error > abs_tol) {
        if (out.evaluations + 30 > max_evals)
            throw Error(ErrorKind::QuadratureFailure, "budget of " + std::to_string(max_evals) +
                                                          " evaluations exhausted with error estimate " +
                                                          std::to_string(total_error));
        const detail::Panel<N> worst = queue.top();
        queue.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        auto left = detail::kronrod15<N>(f, worst.a, mid);
        auto right = detail::kronrod15<N>(f, mid, worst.b);
        out.evaluations += 30;
        total_error += left.error + right.error - worst.error;
        queue.push(left);
        queue.push(right);
    }

    // Sum in interval order so the result does not depend on refinement history.
    std::vector<detail::Panel<N>> panels;
    panels.reserve(queue.size());
    while (!queue.empty()) {
        panels.push_back(queue.top());
        queue.pop();
    }
    std::sort(panels.begin(), panels.end(), [](const auto& x, const auto& y) { return x.a < y.a; });
    out.error = 0.0;
    for (const auto& p : panels) {
        for (std::size_t c = 0; c < N; ++c)
            out.value[c] += p.value[c];
        out.error += p.error;
    }
    return out;
}

} // namespace qsl
