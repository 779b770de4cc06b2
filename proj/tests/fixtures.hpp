#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "coorbit/group_geometry.hpp"
#include "coorbit/transforms.hpp"

namespace fixtures {

using coorbit::Complex;
using coorbit::SignalGrid;
using coorbit::WindowSpec;

// Gaussian atoms with frequencies well inside the phase grid.
inline SignalGrid smooth_signal(const SignalGrid& grid, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> ux(-4, 4), uw(-4, 4);
    std::normal_distribution<double> n01;
    SignalGrid f = grid.zeros_like();
    for (int k = 0; k < 4; ++k) f = f + Complex(n01(rng), n01(rng)) * coorbit::tf_atom(WindowSpec::gaussian(), grid, ux(rng), uw(rng));
    return f;
}

// Meyer wavelets at scales 1/4..4, so the spectrum sits inside [1/12, 16/3].
inline SignalGrid band_signal(const SignalGrid& grid, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> ux(-4, 4), ulog(-2, 2);
    std::uniform_int_distribution<int> count(1, 6);
    std::normal_distribution<double> n01;
    SignalGrid f = grid.zeros_like();
    const int n = count(rng);
    for (int k = 0; k < n; ++k)
        f = f + Complex(n01(rng), n01(rng)) * coorbit::wavelet_atom(WindowSpec::meyer(), grid, ux(rng), std::exp2(ulog(rng)));
    return f;
}

// Gaussian-coefficient expansion in a few Meyer atoms drawn from the dyadic lattice
// with scales 1/4..4. Dyadic scales keep the continuous and band-split Besov norms aligned.
inline SignalGrid frame_atom_signal(const SignalGrid& grid, std::mt19937_64& rng) {
    static const auto lattice = coorbit::make_point_family(coorbit::DyadicSet{-2, 2, -4, 4, 1.0, std::nullopt});
    std::uniform_int_distribution<std::size_t> pick(0, lattice.size() - 1);
    std::uniform_int_distribution<int> count(1, 6);
    std::normal_distribution<double> n01;
    SignalGrid f = grid.zeros_like();
    const int n = count(rng);
    for (int k = 0; k < n; ++k) {
        const auto& p = lattice.points[pick(rng)];
        f = f + Complex(n01(rng), n01(rng)) * coorbit::wavelet_atom(WindowSpec::meyer(), grid, p.x(), p.y());
    }
    return f;
}

// Modulated Gaussian with centre frequency xi0 and width w; its mean is below 1e-20.
inline SignalGrid wave_packet(const SignalGrid& grid, double xi0, double w) {
    return SignalGrid::from_function(grid.offset, grid.spacing, grid.size(), [=](double t) {
        return std::exp(-M_PI * t * t / (w * w)) * std::cos(2 * M_PI * xi0 * t);
    });
}

inline SignalGrid indicator_window(const SignalGrid& grid) {
    return SignalGrid::from_function(grid.offset, grid.spacing, grid.size(), [](double t) { return (t >= 0 && t < 1) ? 1.0 : 0.0; });
}

inline std::vector<double> ranks(const std::vector<double>& v) {
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < idx.size(); ++i) r[idx[i]] = static_cast<double>(i);
    return r;
}

inline double spearman(const std::vector<double>& a, const std::vector<double>& b) {
    const auto ra = ranks(a), rb = ranks(b);
    const double n = static_cast<double>(a.size());
    double d2 = 0;
    for (std::size_t i = 0; i < a.size(); ++i) d2 += (ra[i] - rb[i]) * (ra[i] - rb[i]);
    return 1 - 6 * d2 / (n * (n * n - 1));
}

// a exp(-pi ((x - x0)^2 / p + (xi - xi0)^2 / q)) on the phase plane.
struct SymbolBump {
    Complex a;
    double x, xi, p, q;
};

inline std::vector<SymbolBump> random_bumps(std::mt19937_64& rng, int count) {
    std::uniform_real_distribution<double> uc(-2, 2), uwid(0.3, 1.0);
    std::normal_distribution<double> n01;
    std::vector<SymbolBump> bumps;
    for (int k = 0; k < count; ++k) bumps.push_back({Complex(n01(rng), n01(rng)), uc(rng), uc(rng), uwid(rng), uwid(rng)});
    return bumps;
}

inline coorbit::GroupGridFn bump_symbol(const SignalGrid& grid, const std::vector<SymbolBump>& bumps) {
    auto sym = coorbit::symbol_grid(grid);
    for (std::size_t j = 0; j < sym.ny(); ++j)
        for (std::size_t i = 0; i < sym.nx(); ++i) {
            Complex v = 0;
            for (const auto& b : bumps)
                v += b.a * std::exp(-M_PI * (std::pow(sym.x[i] - b.x, 2) / b.p + std::pow(sym.y[j] - b.xi, 2) / b.q));
            sym.at(i, j) = v;
        }
    return sym;
}

// Relative l2 error of out against the kernel integral int k(x, y) f(y) dy, where the
// Weyl kernel of a Gaussian bump is known in closed form; every stride-th sample is compared.
inline double weyl_kernel_error(const std::vector<SymbolBump>& bumps, const SignalGrid& f, const SignalGrid& out, std::size_t stride) {
    double e2 = 0, r2 = 0;
    for (std::size_t n = 0; n < f.size(); n += stride) {
        const double x = f.t(n);
        Complex k = 0;
        for (std::size_t m = 0; m < f.size(); ++m) {
            const double y = f.t(m), mid = 0.5 * (x + y), z = x - y;
            Complex ker = 0;
            for (const auto& b : bumps)
                ker += b.a * std::exp(-M_PI * std::pow(mid - b.x, 2) / b.p) * std::sqrt(b.q) * std::exp(-M_PI * b.q * z * z) *
                       std::polar(1.0, 2 * M_PI * z * b.xi);
            k += ker * f.values[m];
        }
        k *= f.spacing;
        e2 += std::norm(out.values[n] - k);
        r2 += std::norm(k);
    }
    return std::sqrt(e2 / r2);
}

}  // namespace fixtures
