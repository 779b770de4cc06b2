#include "atom_engine.hpp"

#include "coorbit/fft.hpp"
#include "coorbit/parallel.hpp"

namespace coorbit {

std::vector<Complex> kernel_spectrum_from_centered(std::vector<Complex> centered) {
    fft::forward(centered);
    return centered;
}

std::vector<Complex> recenter(const SignalGrid& g, std::size_t centre) {
    const std::size_t N = g.size();
    std::vector<Complex> out(N);
    for (std::size_t k = 0; k < N; ++k) out[k] = g.values[(centre + k) % N];
    return out;
}

void AtomEngine::add_explicit(std::size_t point, SignalGrid atom) {
    grid_.require_same_grid(atom);
    explicit_points_.push_back(point);
    explicit_atoms_.push_back(std::move(atom));
}

std::vector<Complex> AtomEngine::analyze(const SignalGrid& f) const {
    grid_.require_same_grid(f);
    const std::size_t N = f.size();
    const double h = f.spacing;
    std::vector<Complex> c(count_, 0.0);
    parallel_for(rows_.size(), [&](std::size_t r) {
        const Row& row = rows_[r];
        std::vector<Complex> u = f.values;
        if (!row.modulation.empty())
            for (std::size_t n = 0; n < N; ++n) u[n] *= std::conj(row.modulation[n]);
        fft::forward(u);
        for (std::size_t k = 0; k < N; ++k) u[k] *= std::conj(row.kernel_hat[k]);
        fft::backward(u);
        const double scale = h / static_cast<double>(N);
        for (std::size_t i = 0; i < row.points.size(); ++i) c[row.points[i]] = u[row.shifts[i]] * scale;
    });
    parallel_for(explicit_atoms_.size(), [&](std::size_t i) { c[explicit_points_[i]] = inner(f, explicit_atoms_[i]); });
    return c;
}

SignalGrid AtomEngine::synthesize(const std::vector<Complex>& c) const {
    if (c.size() != count_) fail(ErrorCode::InvalidInput, "coefficient count does not match the family");
    const std::size_t N = grid_.size();
    const std::size_t chunks = std::max<std::size_t>(1, std::min<std::size_t>(thread_count(), rows_.size() + explicit_atoms_.size()));
    std::vector<std::vector<Complex>> partial(chunks, std::vector<Complex>(N, 0.0));
    parallel_for(chunks, [&](std::size_t t) {
        auto& acc = partial[t];
        std::vector<Complex> z(N);
        for (std::size_t r = t; r < rows_.size(); r += chunks) {
            const Row& row = rows_[r];
            std::fill(z.begin(), z.end(), Complex(0.0));
            bool any = false;
            for (std::size_t i = 0; i < row.points.size(); ++i) {
                const Complex v = c[row.points[i]];
                if (v != 0.0) z[row.shifts[i]] += v, any = true;
            }
            if (!any) continue;
            fft::forward(z);
            for (std::size_t k = 0; k < N; ++k) z[k] *= row.kernel_hat[k];
            fft::backward(z);
            const double inv = 1.0 / static_cast<double>(N);
            if (row.modulation.empty())
                for (std::size_t n = 0; n < N; ++n) acc[n] += z[n] * inv;
            else
                for (std::size_t n = 0; n < N; ++n) acc[n] += z[n] * inv * row.modulation[n];
        }
        for (std::size_t i = t; i < explicit_atoms_.size(); i += chunks) {
            const Complex v = c[explicit_points_[i]];
            if (v == 0.0) continue;
            const auto& a = explicit_atoms_[i].values;
            for (std::size_t n = 0; n < N; ++n) acc[n] += v * a[n];
        }
    });
    SignalGrid out = grid_.zeros_like();
    for (const auto& p : partial)
        for (std::size_t n = 0; n < N; ++n) out.values[n] += p[n];
    return out;
}

SignalGrid AtomEngine::atom(std::size_t i) const {
    if (i >= count_) fail(ErrorCode::OutOfRange, "atom index out of range");
    std::vector<Complex> e(count_, 0.0);
    e[i] = 1.0;
    return synthesize(e);
}

}  // namespace coorbit
