#include <algorithm>
#include <cmath>

#include "coorbit/parallel.hpp"
#include "coorbit/spaces.hpp"

namespace coorbit {
namespace {

// Sparse table for range-max queries on one row of |F|.
class RangeMax {
public:
    explicit RangeMax(std::vector<double> row) {
        levels_.push_back(std::move(row));
        const std::size_t n = levels_[0].size();
        for (std::size_t len = 2; len <= n; len *= 2) {
            const auto& prev = levels_.back();
            std::vector<double> next(n - len + 1);
            for (std::size_t i = 0; i + len <= n; ++i) next[i] = std::max(prev[i], prev[i + len / 2]);
            levels_.push_back(std::move(next));
        }
    }

    std::size_t size() const { return levels_[0].size(); }
    double at(std::size_t i) const { return levels_[0][i]; }

    double query(std::size_t lo, std::size_t hi) const {
        const std::size_t len = hi - lo + 1;
        std::size_t k = 0;
        while ((std::size_t{2} << k) <= len) ++k;
        return std::max(levels_[k][lo], levels_[k][hi + 1 - (std::size_t{1} << k)]);
    }

    // Max over samples inside [lo, hi] (continuous positions) plus linearly
    // interpolated values at non-sample endpoints. Returns -1 if nothing is in range.
    double interval_max(double lo, double hi, bool periodic) const {
        const long n = static_cast<long>(size());
        double best = -1.0;
        long i0 = static_cast<long>(std::ceil(lo - 1e-9));
        long i1 = static_cast<long>(std::floor(hi + 1e-9));
        if (periodic) {
            if (i1 - i0 + 1 >= n) return query(0, n - 1);
            if (i0 <= i1) {
                const long a = ((i0 % n) + n) % n;
                const long b = a + (i1 - i0);
                if (b < n) {
                    best = query(a, b);
                } else {
                    best = std::max(query(a, n - 1), query(0, b - n));
                }
            }
        } else {
            i0 = std::max(i0, 0L);
            i1 = std::min(i1, n - 1);
            if (i0 <= i1) best = query(i0, i1);
        }
        for (double pos : {lo, hi}) {
            double k = std::floor(pos);
            const double t = pos - k;
            if (t < 1e-9 || t > 1 - 1e-9) continue;
            long k0 = static_cast<long>(k), k1 = k0 + 1;
            if (periodic) {
                k0 = ((k0 % n) + n) % n;
                k1 = ((k1 % n) + n) % n;
            } else if (k0 < 0 || k1 >= n) {
                continue;
            }
            best = std::max(best, (1 - t) * at(k0) + t * at(k1));
        }
        return best;
    }

private:
    std::vector<std::vector<double>> levels_;
};

}  // namespace

GroupGridFn local_max(const GroupGridFn& F, const Neighborhood& U, Side side) {
    if (U.spec.kind != F.spec.kind) fail(ErrorCode::InvalidInput, "neighborhood and grid belong to different groups");
    const std::size_t nx = F.nx(), ny = F.ny();
    std::vector<RangeMax> rows;
    rows.reserve(ny);
    for (std::size_t iy = 0; iy < ny; ++iy) {
        std::vector<double> r(nx);
        for (std::size_t ix = 0; ix < nx; ++ix) r[ix] = std::abs(F.at(ix, iy));
        rows.emplace_back(std::move(r));
    }
    const bool heis = F.spec.kind == GroupKind::Heisenberg;
    // Right neighborhoods of the affine group dilate x by 1/s; wrapping those ranges
    // would fold far translates back onto the peak.
    const bool periodic = F.x.period > 0 && (heis || side == Side::Left);
    GroupGridFn out = F.zeros_like();

    parallel_for(ny, [&](std::size_t iy) {
        const double yv = F.y[iy];
        double y_lo, y_hi;
        if (heis) {
            const double c = side == Side::Left ? yv : -yv;
            y_lo = c - U.a_freq;
            y_hi = c + U.a_freq;
        } else if (side == Side::Left) {
            y_lo = yv / U.b;
            y_hi = yv * U.b;
        } else {
            y_lo = 1.0 / (yv * U.b);
            y_hi = U.b / yv;
        }
        const long r0 = std::max(0L, static_cast<long>(std::ceil(F.y.position(y_lo) - 1e-9)));
        const long r1 = std::min(static_cast<long>(ny) - 1, static_cast<long>(std::floor(F.y.position(y_hi) + 1e-9)));
        for (std::size_t ix = 0; ix < nx; ++ix) {
            const double xv = F.x[ix];
            double best = 0.0;
            for (long r = r0; r <= r1; ++r) {
                double u_lo, u_hi;
                if (heis) {
                    const double c = side == Side::Left ? xv : -xv;
                    u_lo = c - U.a;
                    u_hi = c + U.a;
                } else if (side == Side::Left) {
                    u_lo = xv - yv * U.a;
                    u_hi = xv + yv * U.a;
                } else {
                    const double v = F.y[r];
                    u_lo = -v * (xv + yv * U.a);
                    u_hi = -v * (xv - yv * U.a);
                }
                best = std::max(best, rows[r].interval_max(F.x.position(u_lo), F.x.position(u_hi), periodic));
            }
            out.at(ix, iy) = best;
        }
    });
    return out;
}

AmalgamReport amalgam_report(const GroupGridFn& F, const Neighborhood& U, const WeightSpec& w, Side side) {
    const GroupGridFn sharp = local_max(F, U, side);
    const bool heis = F.spec.kind == GroupKind::Heisenberg;
    const double x_ext = std::max(std::abs(F.x.first()), std::abs(F.x.last()));
    const double y_ext = heis ? std::max(std::abs(F.y.first()), std::abs(F.y.last()))
                              : std::max(std::abs(std::log2(F.y.first())), std::abs(std::log2(F.y.last())));
    // Masses inside the nested boxes at 1/4, 1/2 and 1 of the grid extent around the identity.
    double box[3] = {0, 0, 0};
    for (std::size_t iy = 0; iy < F.ny(); ++iy) {
        const double yv = F.y[iy];
        const double ylev = y_ext > 0 ? (heis ? std::abs(yv) : std::abs(std::log2(yv))) / y_ext : 0.0;
        for (std::size_t ix = 0; ix < F.nx(); ++ix) {
            const double v = std::abs(sharp.at(ix, iy));
            if (v == 0) continue;
            const double mass = v * eval_weight(w, F.x[ix], yv) * F.haar_weight(ix, iy);
            const double lev = std::max(x_ext > 0 ? std::abs(F.x[ix]) / x_ext : 0.0, ylev);
            if (lev <= 0.25 + 1e-12) box[0] += mass;
            if (lev <= 0.5 + 1e-12) box[1] += mass;
            box[2] += mass;
        }
    }
    AmalgamReport rep;
    rep.norm = box[2];
    const double outer = box[2] - box[1];
    const double middle = box[1] - box[0];
    if (outer <= 1e-12 * box[2]) {
        rep.tail_ratio = 0.0;
        rep.truncation_estimate = std::max(outer, 0.0);
    } else if (middle <= 0) {
        rep.tail_ratio = kInf;
        rep.truncation_estimate = kInf;
    } else {
        rep.tail_ratio = outer / middle;
        rep.truncation_estimate = rep.tail_ratio < 1 ? outer * rep.tail_ratio / (1 - rep.tail_ratio) : kInf;
    }
    rep.finite = std::isfinite(rep.norm) && rep.tail_ratio <= 0.75;
    return rep;
}

double amalgam_norm(const GroupGridFn& F, const Neighborhood& U, const WeightSpec& w, Side side) {
    return amalgam_report(F, U, w, side).norm;
}

GroupGridFn translated_sum(const std::vector<GroupPoint>& points, const std::vector<Complex>& coeffs,
                           const GroupGridFn& H, const GroupGridFn& target) {
    if (points.size() != coeffs.size()) fail(ErrorCode::InvalidInput, "point/coefficient count mismatch");
    if (H.spec.kind != target.spec.kind) fail(ErrorCode::InvalidInput, "grids belong to different groups");
    GroupGridFn out = target.zeros_like();
    const bool heis = target.spec.kind == GroupKind::Heisenberg;
    const double period = target.x.period;
    parallel_for(target.ny(), [&](std::size_t iy) {
        const double yv = target.y[iy];
        for (std::size_t i = 0; i < points.size(); ++i) {
            if (coeffs[i] == 0.0) continue;
            const double xi = points[i].x(), yi = points[i].y();
            const auto hy = H.y.nearest(heis ? yv - yi : yv / yi);
            if (!hy) continue;
            for (std::size_t ix = 0; ix < target.nx(); ++ix) {
                double dx = target.x[ix] - xi;
                if (period > 0) dx -= period * std::floor(dx / period + 0.5);
                const auto hx = H.x.nearest(heis ? dx : dx / yi);
                if (hx) out.at(ix, iy) += coeffs[i] * H.at(*hx, *hy);
            }
        }
    });
    return out;
}

BoundCheck convolution_bound_check(const SequenceData& c, const GroupGridFn& H, const MixedNormParams& params,
                                   const Neighborhood& U) {
    BoundCheck res;
    res.lhs = mixed_norm(translated_sum(c.family.points, c.coeffs, H, H), params);
    const double seq = sequence_norm(c, params, U);
    const double amal = amalgam_norm(H, U, symmetrize_weight(params.weight, H.spec), Side::Right);
    res.rhs = seq * amal;
    res.ratio = res.rhs > 0 ? res.lhs / res.rhs : (res.lhs > 0 ? kInf : 0.0);
    return res;
}

}  // namespace coorbit
