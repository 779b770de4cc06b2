#include "coorbit/spaces.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <map>
#include <sstream>

namespace coorbit {

GridAxis GridAxis::uniform(double start, double step, std::size_t n, double period) {
    if (!(step > 0) || n == 0) fail(ErrorCode::InvalidInput, "uniform axis needs positive step and samples");
    return {Kind::Uniform, start, step, n, period};
}

GridAxis GridAxis::geometric(double s0, int voices, std::size_t n) {
    if (!(s0 > 0) || voices <= 0 || n == 0) fail(ErrorCode::InvalidInput, "geometric axis needs s0 > 0, voices > 0");
    return {Kind::Geometric, s0, 1.0 / voices, n, 0.0};
}

GridAxis GridAxis::scales(double s_min, double s_max, int voices) {
    if (!(s_min > 0) || !(s_max >= s_min)) fail(ErrorCode::InvalidInput, "scale range must satisfy 0 < s_min <= s_max");
    const auto n = static_cast<std::size_t>(std::llround(std::log2(s_max / s_min) * voices)) + 1;
    return geometric(s_min, voices, n);
}

double GridAxis::operator[](std::size_t i) const {
    if (kind == Kind::Uniform) return start + static_cast<double>(i) * step;
    return start * std::exp2(static_cast<double>(i) * step);
}

double GridAxis::cell(std::size_t i) const {
    if (kind == Kind::Uniform) return step;
    return (*this)[i] * std::log(2.0) * step;
}

double GridAxis::position(double v) const {
    if (kind == Kind::Uniform) return (v - start) / step;
    if (!(v > 0)) return -1e300;
    return std::log2(v / start) / step;
}

std::optional<std::size_t> GridAxis::nearest(double v) const {
    if (kind == Kind::Uniform && period > 0) {
        double off = std::fmod(v - start + 0.5 * step, period);
        if (off < 0) off += period;
        auto r = static_cast<long long>(std::floor(off / step));
        if (r >= static_cast<long long>(n)) r = 0;
        return static_cast<std::size_t>(r);
    }
    const double pos = position(v);
    if (!(pos > -0.5) || !(pos < static_cast<double>(n) - 0.5)) return std::nullopt;
    return static_cast<std::size_t>(std::llround(pos));
}

GroupGridFn::GroupGridFn(GroupSpec s, GridAxis ax, GridAxis ay)
    : spec(s), x(ax), y(ay), values(ax.n * ay.n, Complex(0.0)) {
    if (s.d != 1) fail(ErrorCode::UnsupportedDimension, "grid functions are implemented for d = 1");
    if (s.kind == GroupKind::Affine && ay.kind != GridAxis::Kind::Geometric)
        fail(ErrorCode::InvalidInput, "affine grids need a geometric scale axis");
}

double GroupGridFn::haar_weight(std::size_t ix, std::size_t iy) const {
    const double dens = spec.kind == GroupKind::Affine ? 1.0 / (y[iy] * y[iy]) : 1.0;
    return x.cell(ix) * y.cell(iy) * dens;
}

std::vector<double> GroupGridFn::haar_weights() const {
    std::vector<double> w(size());
    for (std::size_t iy = 0; iy < ny(); ++iy)
        for (std::size_t ix = 0; ix < nx(); ++ix) w[iy * nx() + ix] = haar_weight(ix, iy);
    return w;
}

GroupGridFn GroupGridFn::zeros_like() const { return GroupGridFn(spec, x, y); }

std::optional<Complex> GroupGridFn::lookup(double xv, double yv) const {
    auto ix = x.nearest(xv);
    if (!ix) return std::nullopt;
    auto iy = y.nearest(yv);
    if (!iy) return std::nullopt;
    return at(*ix, *iy);
}

std::string WeightSpec::describe() const {
    std::ostringstream os;
    if (symmetrized) os << "sym:";
    switch (kind) {
        case Kind::PolynomialPhase: os << "polynomial(" << param << ")"; break;
        case Kind::PowerScale: os << "power_scale(" << param << ")"; break;
        case Kind::Constant: os << "constant(" << param << ")"; break;
    }
    return os.str();
}

namespace {

double raw_weight(const WeightSpec& w, const std::vector<double>& c) {
    switch (w.kind) {
        case WeightSpec::Kind::PolynomialPhase: {
            double r2 = 0;
            for (double v : c) r2 += v * v;
            return std::pow(1.0 + std::sqrt(r2), w.param);
        }
        case WeightSpec::Kind::PowerScale: return std::pow(c.back(), -w.param);
        case WeightSpec::Kind::Constant: return w.param;
    }
    return 1.0;
}

}  // namespace

double eval_weight(const WeightSpec& w, const GroupPoint& p) {
    const double direct = raw_weight(w, p.coords);
    if (!w.symmetrized) return direct;
    const GroupPoint inv = group_inv(w.group, p);
    return std::max(direct, raw_weight(w, inv.coords) * modular_fn(w.group, inv));
}

double eval_weight(const WeightSpec& w, double x, double y) {
    if (!w.symmetrized) {
        switch (w.kind) {
            case WeightSpec::Kind::PolynomialPhase: return std::pow(1.0 + std::hypot(x, y), w.param);
            case WeightSpec::Kind::PowerScale: return std::pow(y, -w.param);
            case WeightSpec::Kind::Constant: return w.param;
        }
    }
    return eval_weight(w, GroupPoint(x, y));
}

WeightSpec symmetrize_weight(const WeightSpec& w, const GroupSpec& spec) {
    WeightSpec out = w;
    out.symmetrized = true;
    out.group = spec;
    return out;
}

namespace {

double measure_density(const GroupSpec& spec, double y) { return spec.kind == GroupKind::Affine ? 1.0 / (y * y) : 1.0; }

void check_params(const MixedNormParams& params) {
    if (!(params.p >= 1.0) || !(params.q >= 1.0)) fail(ErrorCode::InvalidInput, "mixed-norm exponents must be >= 1");
}

}  // namespace

double mixed_norm(const GroupGridFn& F, const MixedNormParams& params) {
    check_params(params);
    const double p = params.p, q = params.q;
    const std::size_t nx = F.nx(), ny = F.ny();
    std::vector<double> xs(nx);
    for (std::size_t i = 0; i < nx; ++i) xs[i] = F.x[i];
    double outer = 0.0;
    for (std::size_t iy = 0; iy < ny; ++iy) {
        const double yv = F.y[iy];
        double inner = 0.0;
        for (std::size_t ix = 0; ix < nx; ++ix) {
            const double a = std::abs(F.at(ix, iy));
            if (std::isnan(a)) fail(ErrorCode::InvalidInput, "NaN in grid function");
            if (a == 0.0) continue;
            const double v = a * eval_weight(params.weight, xs[ix], yv);
            if (std::isinf(p))
                inner = std::max(inner, v);
            else
                inner += std::pow(v, p) * F.x.cell(ix);
        }
        const double row = std::isinf(p) ? inner : std::pow(inner, 1.0 / p);
        if (std::isinf(q))
            outer = std::max(outer, row);
        else if (row > 0)
            outer += std::pow(row, q) * F.y.cell(iy) * measure_density(F.spec, yv);
    }
    return std::isinf(q) ? outer : std::pow(outer, 1.0 / q);
}

namespace {

using Gauss = boost::math::quadrature::gauss<double, 20>;

// Integral of g(y) d mu(y) over [lo, hi]; affine measure dy / y^2 is integrated in log scale.
template <class G>
double outer_integral(const GroupSpec& spec, double lo, double hi, G g) {
    if (spec.kind == GroupKind::Affine)
        return Gauss::integrate([&](double u) { return g(std::exp(u)) * std::exp(-u); }, std::log(lo), std::log(hi));
    return Gauss::integrate(g, lo, hi);
}

struct Row {
    double y_lo, y_hi;
    std::vector<std::size_t> members;
};

// Groups cells into rows with identical outer intervals; nullopt if cells overlap.
std::optional<std::vector<Row>> tile_rows(const std::vector<Rect>& cells) {
    std::vector<Row> rows;
    std::map<std::pair<long long, long long>, std::size_t> index;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        const auto key = std::make_pair(std::llround(cells[i].y_lo * 1e9), std::llround(cells[i].y_hi * 1e9));
        auto it = index.find(key);
        if (it == index.end()) {
            index[key] = rows.size();
            rows.push_back({cells[i].y_lo, cells[i].y_hi, {i}});
        } else {
            rows[it->second].members.push_back(i);
        }
    }
    std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.y_lo < b.y_lo; });
    for (std::size_t r = 1; r < rows.size(); ++r)
        if (rows[r].y_lo < rows[r - 1].y_hi * (1 - 1e-9) - 1e-12) return std::nullopt;
    for (auto& row : rows) {
        std::sort(row.members.begin(), row.members.end(),
                  [&](std::size_t a, std::size_t b) { return cells[a].x_lo < cells[b].x_lo; });
        for (std::size_t k = 1; k < row.members.size(); ++k)
            if (cells[row.members[k]].x_lo < cells[row.members[k - 1]].x_hi - 1e-9 * (1 + std::abs(cells[row.members[k]].x_lo)))
                return std::nullopt;
    }
    return rows;
}

}  // namespace

double sequence_norm(const SequenceData& c, const MixedNormParams& params, const Neighborhood& U) {
    check_params(params);
    if (c.coeffs.size() != c.family.points.size()) fail(ErrorCode::InvalidInput, "coefficient count mismatch");
    if (c.family.points.empty()) fail(ErrorCode::EmptyFamily, "sequence has no points");
    const GroupSpec& spec = c.family.spec;
    if (spec.d != 1) fail(ErrorCode::UnsupportedDimension, "sequence norms are implemented for d = 1");
    const double p = params.p, q = params.q;
    const auto& w = params.weight;

    std::vector<Rect> cells;
    for (const auto& pt : c.family.points) cells.push_back(translated_cell(U, pt));
    auto rows = tile_rows(cells);

    if (rows && !w.depends_on_x()) {
        double total = 0.0;
        for (const auto& row : *rows) {
            double a = 0.0;
            for (auto i : row.members) {
                const double mag = std::abs(c.coeffs[i]);
                a = std::isinf(p) ? std::max(a, mag) : a + std::pow(mag, p) * (cells[i].x_hi - cells[i].x_lo);
            }
            const double rv = std::isinf(p) ? a : std::pow(a, 1.0 / p);
            if (rv == 0) continue;
            if (std::isinf(q)) {
                const double m = std::max(eval_weight(w, 0.0, row.y_lo), eval_weight(w, 0.0, row.y_hi));
                total = std::max(total, rv * m);
            } else {
                const double mq = outer_integral(spec, row.y_lo, row.y_hi,
                                                 [&](double yv) { return std::pow(eval_weight(w, 0.0, yv), q); });
                total += std::pow(rv, q) * mq;
            }
        }
        return std::isinf(q) ? total : std::pow(total, 1.0 / q);
    }

    if (rows && p == q) {
        double total = 0.0;
        for (std::size_t i = 0; i < cells.size(); ++i) {
            const double mag = std::abs(c.coeffs[i]);
            if (mag == 0) continue;
            const Rect& r = cells[i];
            if (std::isinf(p)) {
                double sup = 0.0;
                for (int a = 0; a <= 16; ++a)
                    for (int b = 0; b <= 16; ++b)
                        sup = std::max(sup, eval_weight(w, r.x_lo + (r.x_hi - r.x_lo) * a / 16.0,
                                                        r.y_lo + (r.y_hi - r.y_lo) * b / 16.0));
                total = std::max(total, mag * sup);
            } else {
                const double vol = outer_integral(spec, r.y_lo, r.y_hi, [&](double yv) {
                    return Gauss::integrate([&](double xv) { return std::pow(eval_weight(w, xv, yv), p); }, r.x_lo,
                                            r.x_hi);
                });
                total += std::pow(mag, p) * vol;
            }
        }
        return std::isinf(p) ? total : std::pow(total, 1.0 / p);
    }

    return sequence_norm_rasterized(c, params, U, raster_grid_for(c, U));
}

GroupGridFn raster_grid_for(const SequenceData& c, const Neighborhood& U, int samples_per_cell) {
    const GroupSpec& spec = c.family.spec;
    double x_lo = kInf, x_hi = -kInf, y_lo = kInf, y_hi = -kInf, min_w = kInf, min_h = kInf;
    for (const auto& pt : c.family.points) {
        const Rect r = translated_cell(U, pt);
        x_lo = std::min(x_lo, r.x_lo);
        x_hi = std::max(x_hi, r.x_hi);
        y_lo = std::min(y_lo, r.y_lo);
        y_hi = std::max(y_hi, r.y_hi);
        min_w = std::min(min_w, r.x_hi - r.x_lo);
        min_h = std::min(min_h, spec.kind == GroupKind::Affine ? std::log2(r.y_hi / r.y_lo) : r.y_hi - r.y_lo);
    }
    double dx = min_w / samples_per_cell;
    const double max_x_samples = 16384;
    if ((x_hi - x_lo) / dx > max_x_samples) dx = (x_hi - x_lo) / max_x_samples;
    const auto nx = static_cast<std::size_t>(std::ceil((x_hi - x_lo) / dx));
    GridAxis ax = GridAxis::uniform(x_lo + 0.5 * dx, dx, nx);
    if (spec.kind == GroupKind::Affine) {
        const int voices = static_cast<int>(std::ceil(samples_per_cell / min_h));
        const auto ny = static_cast<std::size_t>(std::ceil(std::log2(y_hi / y_lo) * voices));
        return GroupGridFn(spec, ax, GridAxis::geometric(y_lo * std::exp2(0.5 / voices), voices, ny));
    }
    const double dy = min_h / samples_per_cell;
    const auto ny = static_cast<std::size_t>(std::ceil((y_hi - y_lo) / dy));
    return GroupGridFn(spec, ax, GridAxis::uniform(y_lo + 0.5 * dy, dy, ny));
}

double sequence_norm_rasterized(const SequenceData& c, const MixedNormParams& params, const Neighborhood& U,
                                const GroupGridFn& raster) {
    GroupGridFn F = raster.zeros_like();
    auto index_range = [](const GridAxis& axis, double lo, double hi) {
        const double a = std::ceil(axis.position(lo) - 1e-9);
        const double b = std::ceil(axis.position(hi) - 1e-9) - 1;
        const long n = static_cast<long>(axis.n);
        return std::make_pair(std::max(0L, static_cast<long>(a)), std::min(n - 1, static_cast<long>(b)));
    };
    for (std::size_t i = 0; i < c.family.points.size(); ++i) {
        const Rect r = translated_cell(U, c.family.points[i]);
        const auto [x0, x1] = index_range(F.x, r.x_lo, r.x_hi);
        const auto [y0, y1] = index_range(F.y, r.y_lo, r.y_hi);
        for (long iy = y0; iy <= y1; ++iy)
            for (long ix = x0; ix <= x1; ++ix) F.at(ix, iy) += c.coeffs[i];
    }
    return mixed_norm(F, params);
}

}  // namespace coorbit
