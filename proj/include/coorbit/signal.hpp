#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "coorbit/error.hpp"

namespace coorbit {

// Samples f(offset + n * spacing), n = 0..N-1. Transforms treat the grid as one
// period of length N * spacing.
struct SignalGrid {
    int d = 1;
    double spacing = 1.0 / 64;
    double offset = -8.0;
    std::vector<Complex> values;

    SignalGrid() = default;
    SignalGrid(double offset_, double spacing_, std::size_t n);

    static SignalGrid standard() { return SignalGrid(-8.0, 1.0 / 64, 1024); }
    static SignalGrid from_function(double offset, double spacing, std::size_t n,
                                    const std::function<Complex(double)>& f);

    std::size_t size() const { return values.size(); }
    double t(std::size_t n) const { return offset + static_cast<double>(n) * spacing; }
    double period() const { return spacing * static_cast<double>(values.size()); }
    SignalGrid zeros_like() const;
    bool same_grid(const SignalGrid& other) const;
    void require_same_grid(const SignalGrid& other) const;
    double norm() const;
};

// <f, g> = h * sum f conj(g)
Complex inner(const SignalGrid& f, const SignalGrid& g);
double relative_error(const SignalGrid& approx, const SignalGrid& exact);
SignalGrid operator+(const SignalGrid& a, const SignalGrid& b);
SignalGrid operator-(const SignalGrid& a, const SignalGrid& b);
SignalGrid operator*(Complex c, const SignalGrid& a);

struct WindowSpec {
    enum class Kind { Gaussian, MeyerBandlimited, CustomGrid };
    Kind kind = Kind::Gaussian;
    // Dilation a: the window is a^{-1/2} g0(t / a), which keeps the unit norm.
    double scale = 1.0;
    SignalGrid samples;  // CustomGrid only

    static WindowSpec gaussian(double scale = 1.0) { return {Kind::Gaussian, scale, {}}; }
    static WindowSpec meyer(double scale = 1.0) { return {Kind::MeyerBandlimited, scale, {}}; }
    static WindowSpec custom(SignalGrid g) { return {Kind::CustomGrid, 1.0, std::move(g)}; }
    std::string describe() const;
};

WindowSpec parse_window(const std::string& name);

// Smooth step on [0,1] built from exp(-1/x); nu(x) + nu(1-x) = 1.
double smooth_step(double x);
// Log-scale bump with theta(u)^2 + theta(u-1)^2 = 1, supported in [-1, 1].
double meyer_profile(double u);

bool has_analytic_spectrum(const WindowSpec& w);
// Continuous Fourier transform of the window at frequency omega.
Complex window_spectrum(const WindowSpec& w, double omega);
// Window value g(t) on the real line (no periodization).
Complex window_value(const WindowSpec& w, double t);
// Frequencies outside [lo, hi] (in |omega|) carry negligible spectrum.
std::pair<double, double> spectral_band(const WindowSpec& w);
// int_0^inf |g^(w)|^2 / w dw; 0 for windows without analytic spectrum.
double calderon_constant(const WindowSpec& w);

// Periodized window samples g(k h) for k in [-N/2, N/2), stored at index k mod N.
std::vector<Complex> centered_window_samples(const WindowSpec& w, const SignalGrid& grid);

// Time-frequency shift e^{2 pi i w t} g(t - x), periodized onto the grid.
SignalGrid tf_atom(const WindowSpec& w, const SignalGrid& grid, double x, double omega);
// Wavelet s^{-1/2} g((t - x) / s), periodized onto the grid.
SignalGrid wavelet_atom(const WindowSpec& w, const SignalGrid& grid, double x, double s);

// Signed DFT frequency of bin k on this grid.
double grid_frequency(const SignalGrid& grid, std::size_t k);

// f^(w_k) sampled at the grid frequencies (h-scaled DFT with the offset phase).
std::vector<Complex> signal_spectrum(const SignalGrid& f);
SignalGrid signal_from_spectrum(const SignalGrid& grid, std::vector<Complex> spectrum);

}  // namespace coorbit
