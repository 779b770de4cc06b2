#pragma once

#include <string>
#include <vector>

#include "coorbit/signal.hpp"
#include "coorbit/spaces.hpp"

namespace coorbit {

using Warnings = std::vector<std::string>;

// Phase-plane sampling: x runs over one signal period with step dx (a multiple of the
// signal spacing), omega over [-omega_max, omega_max) with step domega (a multiple of 1/L).
struct PhaseGridSpec {
    double dx = 0.125;
    double domega = 0.125;
    double omega_max = 8.0;
};

struct ScaleGridSpec {
    double s_min = 1.0 / 32;
    double s_max = 32.0;
    int voices = 16;
};

// V_g f(x, w) = int f(t) conj(g(t - x)) e^{-2 pi i w t} dt, phase factor dropped.
GroupGridFn stft(const SignalGrid& f, const WindowSpec& g, const PhaseGridSpec& grid = {}, Warnings* warnings = nullptr);
// Adjoint synthesis int int V(x,w) M_w T_x g dx dw / ||g||^2 onto the template grid.
SignalGrid istft(const GroupGridFn& V, const WindowSpec& g, const SignalGrid& grid);

// W_g f(x, s) = s^{-1/2} int f(t) conj(g((t - x)/s)) dt, evaluated at every signal sample x.
GroupGridFn cwt(const SignalGrid& f, const WindowSpec& g, const ScaleGridSpec& grid = {}, Warnings* warnings = nullptr);
// Inverse via the Calderon formula: sum over scales of W(., s) * g_s with Haar weights / C_g.
SignalGrid icwt(const GroupGridFn& W, const WindowSpec& g, const SignalGrid& grid);

// Twisted convolution on the phase plane: int int F(y,eta) G(x-y, w-eta) e^{-2 pi i (w-eta) y}.
GroupGridFn heisenberg_convolution(const GroupGridFn& F, const GroupGridFn& G);
// Affine convolution F * W_g h, with the right factor taken from the window spectra.
GroupGridFn affine_convolution_with_transform(const GroupGridFn& F, const WindowSpec& g, const WindowSpec& h,
                                              double h_scale_factor = 1.0);

struct ReproducingResult {
    double residual = 0.0;
};

ReproducingResult reproducing_check(const SignalGrid& f, const WindowSpec& g, const GroupSpec& spec,
                                    const PhaseGridSpec& phase = {}, const ScaleGridSpec& scales = {});

SignalGrid hilbert(const SignalGrid& f);

// sigma^w realized by superposing time-frequency shifts of f weighted by the
// symplectic spectrum of sigma. The symbol grid must span one signal period in x
// and its frequency period Xi must satisfy 1/(Xi h) integer.
class WeylOperator {
public:
    WeylOperator(const GroupGridFn& symbol, const SignalGrid& grid);

    SignalGrid apply(const SignalGrid& f) const;
    // Fraction of spectral energy in the outer eighth of the spectral index range.
    double aliasing_fraction() const { return aliasing_fraction_; }
    const Warnings& warnings() const { return warnings_; }
    std::size_t active_shifts() const { return shifts_.size(); }

private:
    SignalGrid grid_;
    std::vector<long> shifts_;                     // sample shift per active u
    std::vector<std::vector<Complex>> diagonals_;  // D_u(t_n)
    double aliasing_fraction_ = 0.0;
    Warnings warnings_;
};

SignalGrid weyl_apply(const GroupGridFn& symbol, const SignalGrid& f, Warnings* warnings = nullptr);

// Phase-plane grid suited to Weyl symbols for this signal grid: x covers one period
// with step dx, xi covers [-xi_max, xi_max) with step dxi.
GroupGridFn symbol_grid(const SignalGrid& grid, double dx = 0.125, double dxi = 0.125, double xi_max = 8.0);

}  // namespace coorbit
