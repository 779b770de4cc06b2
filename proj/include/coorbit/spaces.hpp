#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "coorbit/group_geometry.hpp"

namespace coorbit {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Sample axis of a group grid. Uniform axes carry an optional period (x axes of
// transforms of periodic signals); geometric axes sample s0 * 2^(i/voices).
struct GridAxis {
    enum class Kind { Uniform, Geometric };
    Kind kind = Kind::Uniform;
    double start = 0.0;  // first sample (s0 for geometric)
    double step = 1.0;   // spacing, or 1/voices in log2 units for geometric
    std::size_t n = 0;
    double period = 0.0;

    static GridAxis uniform(double start, double step, std::size_t n, double period = 0.0);
    static GridAxis geometric(double s0, int voices, std::size_t n);
    // Geometric axis spanning [s_min, s_max] with the given voices per octave.
    static GridAxis scales(double s_min, double s_max, int voices);

    double operator[](std::size_t i) const;
    double cell(std::size_t i) const;
    double first() const { return (*this)[0]; }
    double last() const { return (*this)[n - 1]; }
    // Continuous index of v (log-scale for geometric). Periodic axes are not wrapped here.
    double position(double v) const;
    // Nearest sample, wrapping periodic axes; nullopt when outside by more than half a cell.
    std::optional<std::size_t> nearest(double v) const;
    bool operator==(const GridAxis&) const = default;
};

struct GroupGridFn {
    GroupSpec spec;
    GridAxis x;  // inner (spatial) axis
    GridAxis y;  // outer axis: frequency (Heisenberg) or scale (affine)
    std::vector<Complex> values;  // values[iy * x.n + ix]

    GroupGridFn() = default;
    GroupGridFn(GroupSpec s, GridAxis ax, GridAxis ay);

    std::size_t nx() const { return x.n; }
    std::size_t ny() const { return y.n; }
    std::size_t size() const { return values.size(); }
    Complex& at(std::size_t ix, std::size_t iy) { return values[iy * x.n + ix]; }
    const Complex& at(std::size_t ix, std::size_t iy) const { return values[iy * x.n + ix]; }
    GroupPoint point(std::size_t ix, std::size_t iy) const { return {x[ix], y[iy]}; }
    double haar_weight(std::size_t ix, std::size_t iy) const;
    std::vector<double> haar_weights() const;
    // Same axes, zero values.
    GroupGridFn zeros_like() const;
    // Nearest-sample lookup, nullopt outside the grid.
    std::optional<Complex> lookup(double xv, double yv) const;
};

struct WeightSpec {
    enum class Kind { PolynomialPhase, PowerScale, Constant };
    Kind kind = Kind::Constant;
    double param = 1.0;
    bool symmetrized = false;
    GroupSpec group;

    static WeightSpec polynomial(double s) { return {Kind::PolynomialPhase, s, false, GroupSpec::heisenberg()}; }
    static WeightSpec power_scale(double sigma) { return {Kind::PowerScale, sigma, false, GroupSpec::affine()}; }
    static WeightSpec constant(double c = 1.0) { return {Kind::Constant, c, false, GroupSpec::heisenberg()}; }
    bool depends_on_x() const { return kind == Kind::PolynomialPhase; }
    std::string describe() const;
};

double eval_weight(const WeightSpec& w, const GroupPoint& p);
double eval_weight(const WeightSpec& w, double x, double y);
WeightSpec symmetrize_weight(const WeightSpec& w, const GroupSpec& spec);

struct MixedNormParams {
    double p = 2.0;
    double q = 2.0;
    WeightSpec weight;
};

struct SequenceData {
    PointFamily family;
    std::vector<Complex> coeffs;
};

double mixed_norm(const GroupGridFn& F, const MixedNormParams& params);
double sequence_norm(const SequenceData& c, const MixedNormParams& params, const Neighborhood& U);
// Explicit definition: rasterize sum c_i chi_{x_i U} on the sample grid of raster and take mixed_norm.
double sequence_norm_rasterized(const SequenceData& c, const MixedNormParams& params, const Neighborhood& U,
                                const GroupGridFn& raster);
// Fine grid covering all cells x_i U, used by the rasterized fallback.
GroupGridFn raster_grid_for(const SequenceData& c, const Neighborhood& U, int samples_per_cell = 32);

enum class Side { Left, Right };

GroupGridFn local_max(const GroupGridFn& F, const Neighborhood& U, Side side);

struct AmalgamReport {
    double norm = 0.0;
    double truncation_estimate = 0.0;
    // Mass growth from the half-size box to the full grid relative to growth from the
    // quarter-size to the half-size box. Decaying envelopes give values well below 1.
    double tail_ratio = 0.0;
    bool finite = true;
};

AmalgamReport amalgam_report(const GroupGridFn& F, const Neighborhood& U, const WeightSpec& w, Side side);
double amalgam_norm(const GroupGridFn& F, const Neighborhood& U, const WeightSpec& w, Side side);

// Sum_i coeff_i * H(x_i^{-1} z) on the samples of target. When target's x axis is
// periodic, x offsets use the minimal image so periodized functions translate correctly.
GroupGridFn translated_sum(const std::vector<GroupPoint>& points, const std::vector<Complex>& coeffs,
                           const GroupGridFn& H, const GroupGridFn& target);

struct BoundCheck {
    double lhs = 0.0;
    double rhs = 0.0;
    double ratio = 0.0;
};

BoundCheck convolution_bound_check(const SequenceData& c, const GroupGridFn& H, const MixedNormParams& params,
                                   const Neighborhood& U);

}  // namespace coorbit
