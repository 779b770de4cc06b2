#pragma once

#include <array>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "coorbit/error.hpp"

namespace coorbit {

enum class GroupKind { Heisenberg, Affine };

struct GroupSpec {
    GroupKind kind = GroupKind::Heisenberg;
    int d = 1;

    static GroupSpec heisenberg(int d = 1) { return {GroupKind::Heisenberg, d}; }
    static GroupSpec affine(int d = 1) { return {GroupKind::Affine, d}; }
    std::size_t coord_count() const { return kind == GroupKind::Heisenberg ? 2 * d : d + 1; }
    bool operator==(const GroupSpec&) const = default;
};

std::string group_name(GroupKind kind);
GroupKind parse_group_kind(const std::string& name);

// Heisenberg: (x_1..x_d, w_1..w_d). Affine: (x_1..x_d, s).
struct GroupPoint {
    std::vector<double> coords;

    GroupPoint() = default;
    explicit GroupPoint(std::vector<double> c) : coords(std::move(c)) {}
    GroupPoint(double x, double y) : coords{x, y} {}
    double x() const { return coords.front(); }
    double y() const { return coords.back(); }
    bool operator==(const GroupPoint&) const = default;
};

void validate_point(const GroupSpec& spec, const GroupPoint& p);
GroupPoint identity(const GroupSpec& spec);
GroupPoint group_mul(const GroupSpec& spec, const GroupPoint& p, const GroupPoint& q);
GroupPoint group_inv(const GroupSpec& spec, const GroupPoint& p);
double haar_density(const GroupSpec& spec, const GroupPoint& p);
double modular_fn(const GroupSpec& spec, const GroupPoint& p);

// Heisenberg: box with half-width a on the x-part and a_freq on the frequency part
// (a_freq = a gives the cube [-a,a]^{2d}). Affine: B(0,a) x [1/b, b].
struct Neighborhood {
    GroupSpec spec;
    double a = 0.5;
    double a_freq = 0.5;
    double b = 2.0;

    static Neighborhood heisenberg_box(double a, double a_freq, int d = 1);
    static Neighborhood heisenberg_cube(double a, int d = 1) { return heisenberg_box(a, a, d); }
    static Neighborhood affine(double a, double b, int d = 1);
    bool contains(const GroupPoint& p) const;
};

struct GaborLattice {
    double alpha = 1.0;
    double beta = 1.0;
    int m_lo = 0, m_hi = 0;  // inclusive
    int n_lo = 0, n_hi = 0;  // inclusive
};

// Points (2^-j k step, 2^-j). When cover is set, each scale gets the k-range whose
// translates fall in [cover_lo, cover_hi) instead of the fixed k-range.
struct DyadicSet {
    int j_lo = 0, j_hi = 0;  // inclusive
    int k_lo = 0, k_hi = 0;  // inclusive
    double step = 1.0;
    std::optional<std::pair<double, double>> cover;
};

using Generator = std::variant<GaborLattice, DyadicSet>;

struct PointFamily {
    GroupSpec spec;
    std::vector<GroupPoint> points;
    std::vector<std::array<int, 2>> labels;
    Generator generator;

    std::size_t size() const { return points.size(); }
};

PointFamily make_point_family(const Generator& generator);

// Axis-aligned region of the group; for the affine scale axis the samples are
// geometrically spaced between lo and hi.
struct DomainBox {
    std::vector<double> lo;
    std::vector<double> hi;
    int samples_per_axis = 41;
};

struct WellSpreadReport {
    bool u_dense_on_box = false;
    int max_overlap = 0;
};

WellSpreadReport check_well_spread(const PointFamily& family, const Neighborhood& U, const DomainBox& box);

// Axis-aligned bounding rectangle of p*U in (x, y) coordinates for d = 1.
struct Rect {
    double x_lo, x_hi, y_lo, y_hi;
};
Rect translated_cell(const Neighborhood& U, const GroupPoint& p);

}  // namespace coorbit
