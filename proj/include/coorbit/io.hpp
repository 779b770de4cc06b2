#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "coorbit/coorbit_operators.hpp"
#include "coorbit/frames.hpp"
#include "coorbit/molecules.hpp"

namespace coorbit::io {

using Json = nlohmann::ordered_json;

inline constexpr const char* kLibraryVersion = "0.1.0";
inline constexpr int kFormatVersion = 1;

// Doubles as JSON numbers; infinities and NaN become the strings "inf", "-inf", "nan".
Json number(double v);
double number_from(const Json& j);
Json versions();

Json to_json(const SignalGrid& f);
SignalGrid signal_from_json(const Json& j);
Json to_json(const WindowSpec& w);
WindowSpec window_from_json(const Json& j);
Json to_json(const WeightSpec& w);
WeightSpec weight_from_json(const Json& j);
// "constant", "sigma=<r>" (s^-r on the affine group) or "s=<v>" ((1 + |(x, w)|)^v on the phase plane).
WeightSpec parse_weight(const std::string& text);
Json to_json(const GroupSpec& g);
GroupSpec group_from_json(const Json& j);
Json to_json(const Neighborhood& U);
Json to_json(const GridAxis& a);
GridAxis axis_from_json(const Json& j);
Json to_json(const GroupGridFn& F);
GroupGridFn group_grid_from_json(const Json& j);

// Families generated from a lattice or dyadic set store the generator; explicit
// families store their points.
Json to_json(const PointFamily& fam);
PointFamily point_family_from_json(const Json& j);
Json to_json(const FrameSystem& sys);
// Rebuilds the atoms and reinstalls any stored duals.
FrameSystem frame_system_from_json(const Json& j);
Json to_json(const MoleculeFamily& fam);
MoleculeFamily molecule_family_from_json(const Json& j);

Json envelope_sidecar(const Envelope& env);
Json to_json(const FrameBounds& fb);
Json to_json(const Certificate& cert);

Json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const Json& j);
// Columns t, re, im.
void write_signal_csv(const std::string& path, const SignalGrid& f);
// Whitespace-separated "a b v" rows with a blank line after each outer row (gnuplot pm3d layout).
void write_plot_data(const std::string& path, const GroupGridFn& F, const std::string& value_label);

struct ConfigEntry {
    std::string key;
    std::string value;
    int line = 0;
};
// Flat key = value lines; '#' starts a comment. Malformed lines and repeated keys
// raise a Config error naming the source and line.
std::vector<ConfigEntry> parse_flat_config(const std::string& text, const std::string& source);
std::vector<ConfigEntry> read_flat_config(const std::string& path);

}  // namespace coorbit::io
