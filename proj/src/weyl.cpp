#include <cmath>
#include <sstream>

#include "coorbit/fft.hpp"
#include "coorbit/parallel.hpp"
#include "coorbit/transforms.hpp"

namespace coorbit {

GroupGridFn symbol_grid(const SignalGrid& grid, double dx, double dxi, double xi_max) {
    const double L = grid.period();
    const auto nx = static_cast<std::size_t>(std::lround(L / dx));
    const auto nxi = static_cast<std::size_t>(std::lround(2 * xi_max / dxi));
    return GroupGridFn(GroupSpec::heisenberg(), GridAxis::uniform(grid.offset, dx, nx, L),
                       GridAxis::uniform(-xi_max, dxi, nxi));
}

WeylOperator::WeylOperator(const GroupGridFn& symbol, const SignalGrid& grid) : grid_(grid.zeros_like()) {
    if (symbol.spec.kind != GroupKind::Heisenberg) fail(ErrorCode::InvalidInput, "Weyl symbols live on the phase plane");
    const std::size_t N = grid.size(), nx = symbol.nx(), nxi = symbol.ny();
    const double L = grid.period(), h = grid.spacing;
    const double dx = symbol.x.step, dxi = symbol.y.step;
    if (std::abs(nx * dx - L) > 1e-9 * L) fail(ErrorCode::InvalidInput, "symbol x-axis must span one signal period");
    if (nx > N) fail(ErrorCode::InvalidInput, "symbol x-axis is finer than the signal grid");
    const double Xi = nxi * dxi;
    const double qd = 1.0 / (Xi * h);
    const long q = std::lround(qd);
    if (q <= 0 || std::abs(qd - q) > 1e-6) fail(ErrorCode::InvalidInput, "1/(xi-period * spacing) must be an integer");

    // 2D DFT: along x in each xi-row, then along xi in each x-frequency column.
    std::vector<Complex> S = symbol.values;
    for (std::size_t b = 0; b < nxi; ++b) fft::forward(&S[b * nx], nx);
    std::vector<Complex> col(nxi);
    for (std::size_t j = 0; j < nx; ++j) {
        for (std::size_t b = 0; b < nxi; ++b) col[b] = S[b * nx + j];
        fft::forward(col);
        for (std::size_t l = 0; l < nxi; ++l) S[l * nx + j] = col[l];
    }
    const double x0 = symbol.x.start, xi0 = symbol.y.start;
    double peak = 0, total = 0, edge = 0;
    for (std::size_t l = 0; l < nxi; ++l) {
        const long ls = fft::signed_bin(l, nxi);
        const double u = ls / Xi;
        for (std::size_t j = 0; j < nx; ++j) {
            const long js = fft::signed_bin(j, nx);
            const double eta = js / L;
            Complex& v = S[l * nx + j];
            v *= dx * dxi * std::polar(1.0, -2 * M_PI * (eta * x0 + u * xi0));
            const double e = std::norm(v);
            peak = std::max(peak, std::abs(v));
            total += e;
            if (std::abs(js) * 8 > 3 * static_cast<long>(nx) || std::abs(ls) * 8 > 3 * static_cast<long>(nxi)) edge += e;
        }
    }
    aliasing_fraction_ = total > 0 ? edge / total : 0.0;
    if (aliasing_fraction_ > 1e-6) {
        std::ostringstream os;
        os << "symbol undersampled: aliasing fraction " << aliasing_fraction_;
        warnings_.push_back(os.str());
    }

    for (std::size_t l = 0; l < nxi; ++l) {
        const long ls = fft::signed_bin(l, nxi);
        const double u = ls / Xi;
        std::vector<Complex> c(N, 0.0);
        bool any = false;
        for (std::size_t j = 0; j < nx; ++j) {
            const Complex v = S[l * nx + j];
            if (std::abs(v) <= 1e-15 * peak) continue;
            const long js = fft::signed_bin(j, nx);
            const double eta = js / L;
            c[static_cast<std::size_t>((js % static_cast<long>(N) + static_cast<long>(N)) % static_cast<long>(N))] +=
                v * std::polar(1.0 / (L * Xi), M_PI * eta * u + 2 * M_PI * eta * grid.offset);
            any = true;
        }
        if (!any) continue;
        fft::backward(c);
        shifts_.push_back(ls * q);
        diagonals_.push_back(std::move(c));
    }
}

SignalGrid WeylOperator::apply(const SignalGrid& f) const {
    grid_.require_same_grid(f);
    const long N = static_cast<long>(f.size());
    SignalGrid out = f.zeros_like();
    parallel_for(f.size(), [&](std::size_t n) {
        Complex acc = 0;
        for (std::size_t i = 0; i < shifts_.size(); ++i) {
            const long src = ((static_cast<long>(n) + shifts_[i]) % N + N) % N;
            acc += diagonals_[i][n] * f.values[src];
        }
        out.values[n] = acc;
    });
    return out;
}

SignalGrid weyl_apply(const GroupGridFn& symbol, const SignalGrid& f, Warnings* warnings) {
    const WeylOperator op(symbol, f);
    if (warnings) warnings->insert(warnings->end(), op.warnings().begin(), op.warnings().end());
    return op.apply(f);
}

}  // namespace coorbit
