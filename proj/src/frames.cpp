#include "coorbit/frames.hpp"

#include <Eigen/Eigenvalues>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <sstream>

#include "atom_engine.hpp"
#include "coorbit/fft.hpp"

namespace coorbit {
namespace {

struct Placement {
    bool on_grid = false;
    std::size_t shift = 0;
};

Placement place(const SignalGrid& grid, double x) {
    const double pos = (x - grid.offset) / grid.spacing;
    const double r = std::round(pos);
    Placement p;
    p.on_grid = std::abs(pos - r) <= 1e-9 * std::max(1.0, std::abs(pos));
    const long N = static_cast<long>(grid.size());
    p.shift = static_cast<std::size_t>(((static_cast<long>(r) % N) + N) % N);
    return p;
}

bool integral(double v) { return std::abs(v - std::round(v)) <= 1e-9 * std::max(1.0, std::abs(v)); }

// Grid origin sits on a sample; needed to centre sampled kernels.
std::size_t origin_index(const SignalGrid& grid) {
    const double o = -grid.offset / grid.spacing;
    if (!integral(o) || o < 0 || o >= static_cast<double>(grid.size()))
        fail(ErrorCode::Unsupported, "t = 0 must be a sample of the grid");
    return static_cast<std::size_t>(std::lround(o));
}

std::vector<Complex> modulation(const SignalGrid& grid, double w) {
    if (w == 0.0) return {};
    std::vector<Complex> m(grid.size());
    for (std::size_t n = 0; n < m.size(); ++n) m[n] = std::polar(1.0, 2 * M_PI * w * grid.t(n));
    return m;
}

void check_range(const PointFamily& family, const SignalGrid& grid) {
    const double lo = grid.offset, hi = grid.offset + grid.period(), nyq = 0.5 / grid.spacing;
    const double s_lo = 2 * grid.spacing, s_hi = grid.period();
    std::vector<std::size_t> bad;
    for (std::size_t i = 0; i < family.size(); ++i) {
        const auto& p = family.points[i];
        const double eps = 1e-9 * grid.period();
        bool ok = p.x() >= lo - eps && p.x() < hi - eps;
        if (family.spec.kind == GroupKind::Heisenberg)
            ok = ok && std::abs(p.y()) <= nyq;
        else
            ok = ok && p.y() >= s_lo * (1 - 1e-12) && p.y() <= s_hi * (1 + 1e-12);
        if (!ok) bad.push_back(i);
    }
    if (bad.empty()) return;
    std::ostringstream os;
    os << bad.size() << " family point(s) outside the transform grid:";
    for (std::size_t k = 0; k < std::min<std::size_t>(bad.size(), 10); ++k) {
        const auto& p = family.points[bad[k]];
        os << " #" << bad[k] << "(" << p.x() << ", " << p.y() << ")";
    }
    if (bad.size() > 10) os << " ...";
    fail(ErrorCode::OutOfRange, os.str());
}

std::shared_ptr<AtomEngine> build_engine(const WindowSpec& window, const PointFamily& family, const SignalGrid& grid) {
    auto engine = std::make_shared<AtomEngine>(grid, family.size());
    const bool heis = family.spec.kind == GroupKind::Heisenberg;
    std::map<double, AtomEngine::Row> rows;
    std::vector<Complex> base_hat;
    for (std::size_t i = 0; i < family.size(); ++i) {
        const auto& p = family.points[i];
        const Placement pl = place(grid, p.x());
        bool row_ok = pl.on_grid;
        if (heis && window.kind == WindowSpec::Kind::MeyerBandlimited) row_ok = row_ok && integral(p.y() * grid.period());
        if (!heis && window.kind == WindowSpec::Kind::CustomGrid && p.y() != 1.0)
            fail(ErrorCode::Unsupported, "custom windows cannot be dilated");
        if (!row_ok) {
            engine->add_explicit(i, heis ? tf_atom(window, grid, p.x(), p.y()) : wavelet_atom(window, grid, p.x(), p.y()));
            continue;
        }
        auto [it, fresh] = rows.try_emplace(p.y());
        AtomEngine::Row& row = it->second;
        if (fresh) {
            if (heis) {
                if (base_hat.empty()) base_hat = kernel_spectrum_from_centered(centered_window_samples(window, grid));
                row.kernel_hat = base_hat;
                row.modulation = modulation(grid, p.y());
            } else {
                WindowSpec ws = window;
                ws.scale = window.scale * p.y();
                row.kernel_hat = kernel_spectrum_from_centered(centered_window_samples(ws, grid));
            }
        }
        row.points.push_back(i);
        row.shifts.push_back(pl.shift);
    }
    for (auto& [key, row] : rows) engine->add_row(std::move(row));
    return engine;
}

SignalGrid apply_frame_operator(const AtomEngine& e, const SignalGrid& f) { return e.synthesize(e.analyze(f)); }

double dot_re(const SignalGrid& a, const SignalGrid& b) { return inner(a, b).real(); }

void axpy(Complex a, const SignalGrid& x, SignalGrid& y) {
    for (std::size_t n = 0; n < y.size(); ++n) y.values[n] += a * x.values[n];
}

// Smallest p dividing N with the index set invariant under shifts by p.
std::size_t shift_period(const std::vector<std::size_t>& shifts, std::size_t N) {
    std::vector<char> in(N, 0);
    for (auto s : shifts) in[s] = 1;
    for (std::size_t p = 1; p < N; ++p) {
        if (N % p) continue;
        bool ok = true;
        for (std::size_t n = 0; n < N && ok; ++n) ok = in[n] == in[(n + p) % N];
        if (ok) return p;
    }
    return N;
}

SignalGrid random_signal(const SignalGrid& grid, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n01;
    SignalGrid r = grid.zeros_like();
    for (auto& v : r.values) v = Complex(n01(rng), n01(rng));
    return r;
}

}  // namespace

FrameSystem make_frame_system(const WindowSpec& window, const PointFamily& family, const SignalGrid& grid) {
    if (family.size() == 0) fail(ErrorCode::EmptyFamily, "frame system needs at least one point");
    if (family.spec.d != 1) fail(ErrorCode::UnsupportedDimension, "frame systems are implemented for d = 1");
    const bool gabor = std::holds_alternative<GaborLattice>(family.generator);
    if (gabor != (family.spec.kind == GroupKind::Heisenberg))
        fail(ErrorCode::InvalidInput, "Gabor lattices pair with the Heisenberg group, dyadic sets with the affine group");
    check_range(family, grid);
    FrameSystem sys;
    sys.spec = family.spec;
    sys.window = window;
    sys.family = family;
    sys.grid = grid.zeros_like();
    sys.engine = build_engine(window, family, grid);
    return sys;
}

GaborLattice grid_compatible_lattice(const SignalGrid& grid, double alpha, double beta) {
    const double h = grid.spacing, L = grid.period();
    if (!(alpha > 0) || !(beta > 0)) fail(ErrorCode::InvalidInput, "lattice constants must be positive");
    if (!integral(alpha / h) || !integral(L / alpha)) fail(ErrorCode::InvalidInput, "alpha must be a sample multiple dividing the period");
    if (!integral(beta * L) || !integral(1.0 / (h * beta)))
        fail(ErrorCode::InvalidInput, "beta must be a multiple of 1/L dividing the sampled band");
    GaborLattice lat;
    lat.alpha = alpha;
    lat.beta = beta;
    lat.m_lo = static_cast<int>(std::ceil(grid.offset / alpha - 1e-9));
    lat.m_hi = lat.m_lo + static_cast<int>(std::lround(L / alpha)) - 1;
    const long count = std::lround(1.0 / (h * beta));
    lat.n_lo = static_cast<int>(std::ceil(-0.5 / (h * beta) - 1e-9));
    lat.n_hi = lat.n_lo + static_cast<int>(count) - 1;
    return lat;
}

DyadicSet covering_dyadic_set(const SignalGrid& grid, int j_lo, int j_hi, double step) {
    DyadicSet d;
    d.j_lo = j_lo;
    d.j_hi = j_hi;
    d.step = step;
    d.cover = std::pair{grid.offset, grid.offset + grid.period()};
    return d;
}

SequenceData analysis(const FrameSystem& sys, const SignalGrid& f) { return {sys.family, sys.engine->analyze(f)}; }

SignalGrid synthesis(const FrameSystem& sys, const SequenceData& c) {
    if (c.family.size() != sys.family.size()) fail(ErrorCode::InvalidInput, "coefficients are indexed by a different family");
    return synthesis(sys, c.coeffs);
}

SignalGrid synthesis(const FrameSystem& sys, const std::vector<Complex>& c) { return sys.engine->synthesize(c); }

SignalGrid frame_operator_apply(const FrameSystem& sys, const SignalGrid& f) { return apply_frame_operator(*sys.engine, f); }

SignalGrid covered_projection(const FrameSystem& sys, const SignalGrid& f) {
    sys.grid.require_same_grid(f);
    if (sys.spec.kind == GroupKind::Heisenberg) return f;
    double s_min = kInf, s_max = 0;
    for (const auto& p : sys.family.points) s_min = std::min(s_min, p.y()), s_max = std::max(s_max, p.y());
    const auto [lo, hi] = spectral_band(sys.window);
    const double band_lo = 2 * lo / s_max, band_hi = hi / (2 * s_min);
    std::vector<Complex> F = f.values;
    fft::forward(F);
    const double tol = 1e-12 * band_hi;
    for (std::size_t k = 0; k < F.size(); ++k) {
        const double w = std::abs(grid_frequency(f, k));
        F[k] = (w >= band_lo - tol && w <= band_hi + tol) ? F[k] / static_cast<double>(F.size()) : 0.0;
    }
    fft::backward(F);
    SignalGrid out = f.zeros_like();
    out.values = std::move(F);
    return out;
}

namespace {

CgResult conjugate_gradient(const std::function<SignalGrid(const SignalGrid&)>& op, const SignalGrid& b, const CgOptions& opt) {
    CgResult res;
    res.x = b.zeros_like();
    const double bn = b.norm();
    if (bn == 0.0) {
        res.converged = true;
        return res;
    }
    SignalGrid r = b, p = b;
    double rs = dot_re(r, r);
    for (int it = 0; it < opt.max_iter; ++it) {
        const SignalGrid Ap = op(p);
        const double pAp = dot_re(p, Ap);
        if (!(pAp > 0)) break;
        const double a = rs / pAp;
        axpy(a, p, res.x);
        axpy(-a, Ap, r);
        const double rs_new = dot_re(r, r);
        res.iterations = it + 1;
        if (std::sqrt(rs_new) <= opt.tol * bn) {
            rs = rs_new;
            break;
        }
        const double beta = rs_new / rs;
        rs = rs_new;
        for (std::size_t n = 0; n < p.size(); ++n) p.values[n] = r.values[n] + beta * p.values[n];
    }
    res.residual = (op(res.x) - b).norm() / bn;
    res.converged = res.residual <= std::max(opt.tol, 1e-10);
    return res;
}

}  // namespace

CgResult frame_solve(const FrameSystem& sys, const SignalGrid& b, const CgOptions& opt, bool restrict) {
    sys.grid.require_same_grid(b);
    if (!restrict) return conjugate_gradient([&](const SignalGrid& v) { return frame_operator_apply(sys, v); }, b, opt);
    auto op = [&](const SignalGrid& v) { return covered_projection(sys, frame_operator_apply(sys, covered_projection(sys, v))); };
    return conjugate_gradient(op, covered_projection(sys, b), opt);
}

FrameBounds frame_bounds(const FrameSystem& sys, int n_iter) {
    if (n_iter < 2) fail(ErrorCode::InvalidInput, "frame_bounds needs at least two iterations");
    auto op = [&](const SignalGrid& v) { return covered_projection(sys, frame_operator_apply(sys, covered_projection(sys, v))); };
    SignalGrid v = covered_projection(sys, random_signal(sys.grid, 0x5eedULL));
    const double vn = v.norm();
    if (vn == 0.0) fail(ErrorCode::InvalidInput, "covered region is empty");
    v = (1.0 / vn) * v;

    const int m = std::min<int>(n_iter, static_cast<int>(sys.grid.size()));
    std::vector<SignalGrid> basis{v};
    std::vector<double> alpha, beta;
    for (int k = 0; k < m; ++k) {
        SignalGrid w = op(basis.back());
        alpha.push_back(dot_re(w, basis.back()));
        for (int pass = 0; pass < 2; ++pass)
            for (const auto& q : basis) axpy(-inner(w, q), q, w);
        const double b = w.norm();
        const double scale = std::abs(*std::max_element(alpha.begin(), alpha.end(), [](double x, double y) { return std::abs(x) < std::abs(y); }));
        if (k + 1 == m || b <= 1e-12 * std::max(scale, 1e-300)) break;
        beta.push_back(b);
        basis.push_back((1.0 / b) * w);
    }
    Eigen::VectorXd diag = Eigen::Map<Eigen::VectorXd>(alpha.data(), static_cast<Eigen::Index>(alpha.size()));
    Eigen::VectorXd sub(static_cast<Eigen::Index>(alpha.size() > 0 ? alpha.size() - 1 : 0));
    for (Eigen::Index i = 0; i < sub.size(); ++i) sub[i] = beta[static_cast<std::size_t>(i)];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig;
    eig.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
    FrameBounds fb;
    fb.A_est = std::max(0.0, eig.eigenvalues().minCoeff());
    fb.B_est = eig.eigenvalues().maxCoeff();

    const auto cg = frame_solve(sys, random_signal(sys.grid, 0xcafeULL), {}, true);
    fb.cg_residual = cg.residual;
    fb.cg_iterations = cg.iterations;
    fb.is_frame = cg.converged && fb.A_est > 1e-12 * fb.B_est;
    return fb;
}

SignalGrid dual_window(FrameSystem& sys, const CgOptions& opt) {
    const auto& grid = sys.grid;
    const std::size_t N = grid.size();
    const std::size_t origin = origin_index(grid);
    const FrameBounds fb = frame_bounds(sys);
    if (!fb.is_frame) {
        std::ostringstream os;
        os << "not a frame on the covered region: A_est " << fb.A_est << ", B_est " << fb.B_est << ", CG residual "
           << fb.cg_residual;
        fail(ErrorCode::NotAFrame, os.str());
    }
    // Affine families are frames only on the covered band, so their duals are S^-1 P psi.
    const bool restrict = sys.spec.kind == GroupKind::Affine;
    auto solve = [&](const SignalGrid& b) {
        auto r = frame_solve(sys, b, opt, restrict);
        if (!r.converged) {
            std::ostringstream os;
            os << "frame operator inversion stagnated: residual " << r.residual << " after " << r.iterations << " iterations";
            fail(ErrorCode::IllConditioned, os.str());
        }
        return r.x;
    };
    auto dual = std::make_shared<AtomEngine>(grid, sys.family.size());
    SignalGrid result;

    if (sys.spec.kind == GroupKind::Heisenberg) {
        std::size_t in_rows = 0;
        for (const auto& r : sys.engine->rows()) in_rows += r.points.size();
        if (in_rows != sys.family.size())
            fail(ErrorCode::Unsupported, "dual windows need lattice points on the signal grid");
        result = solve(tf_atom(sys.window, grid, 0.0, 0.0));
        const auto gamma_hat = kernel_spectrum_from_centered(recenter(result, origin));
        for (const auto& row : sys.engine->rows()) {
            AtomEngine::Row d = row;
            d.kernel_hat = gamma_hat;
            dual->add_row(std::move(d));
        }
        sys.dual_window = result;
        sys.point_duals.clear();
    } else {
        std::size_t tau = 1;
        for (const auto& row : sys.engine->rows()) tau = std::lcm(tau, shift_period(row.shifts, N));
        for (const auto& row : sys.engine->rows()) {
            std::map<std::size_t, AtomEngine::Row> sub;
            for (std::size_t i = 0; i < row.points.size(); ++i) {
                const std::size_t residue = row.shifts[i] % tau;
                auto [it, fresh] = sub.try_emplace(residue);
                it->second.points.push_back(row.points[i]);
                it->second.shifts.push_back(row.shifts[i]);
                if (fresh) {
                    const SignalGrid e = solve(sys.engine->atom(row.points[i]));
                    it->second.kernel_hat = kernel_spectrum_from_centered(recenter(e, row.shifts[i]));
                }
            }
            for (auto& [r, d] : sub) {
                (void)r;
                dual->add_row(std::move(d));
            }
        }
        std::vector<bool> in_row(sys.family.size(), false);
        for (const auto& row : sys.engine->rows())
            for (auto p : row.points) in_row[p] = true;
        for (std::size_t i = 0; i < sys.family.size(); ++i)
            if (!in_row[i]) dual->add_explicit(i, solve(sys.engine->atom(i)));
        result = solve(wavelet_atom(sys.window, grid, 0.0, 1.0));
        sys.dual_window.reset();
        sys.point_duals.clear();
        sys.point_duals.reserve(sys.family.size());
        for (std::size_t i = 0; i < sys.family.size(); ++i) sys.point_duals.push_back(dual->atom(i));
    }
    sys.dual_engine = dual;
    return result;
}

void attach_duals(FrameSystem& sys, const std::optional<SignalGrid>& dual_window, const std::vector<SignalGrid>& point_duals) {
    auto dual = std::make_shared<AtomEngine>(sys.grid, sys.family.size());
    if (sys.spec.kind == GroupKind::Heisenberg) {
        if (!dual_window) fail(ErrorCode::MissingDual, "Gabor systems need the dual window");
        sys.grid.require_same_grid(*dual_window);
        std::size_t in_rows = 0;
        for (const auto& r : sys.engine->rows()) in_rows += r.points.size();
        if (in_rows != sys.family.size()) fail(ErrorCode::Unsupported, "dual windows need lattice points on the signal grid");
        const auto gamma_hat = kernel_spectrum_from_centered(recenter(*dual_window, origin_index(sys.grid)));
        for (const auto& row : sys.engine->rows()) {
            AtomEngine::Row d = row;
            d.kernel_hat = gamma_hat;
            dual->add_row(std::move(d));
        }
        sys.dual_window = *dual_window;
        sys.point_duals.clear();
    } else {
        if (point_duals.size() != sys.family.size()) fail(ErrorCode::MissingDual, "one dual atom per point is needed");
        for (std::size_t i = 0; i < point_duals.size(); ++i) {
            sys.grid.require_same_grid(point_duals[i]);
            dual->add_explicit(i, point_duals[i]);
        }
        sys.dual_window.reset();
        sys.point_duals = point_duals;
    }
    sys.dual_engine = dual;
}

SequenceData dual_analysis(const FrameSystem& sys, const SignalGrid& f) {
    if (!sys.dual_engine) fail(ErrorCode::MissingDual, "dual atoms have not been computed");
    return {sys.family, sys.dual_engine->analyze(f)};
}

SignalGrid dual_synthesis(const FrameSystem& sys, const std::vector<Complex>& c) {
    if (!sys.dual_engine) fail(ErrorCode::MissingDual, "dual atoms have not been computed");
    return sys.dual_engine->synthesize(c);
}

SignalGrid reconstruct(const FrameSystem& sys, const SignalGrid& f) { return synthesis(sys, dual_analysis(sys, f).coeffs); }

}  // namespace coorbit
