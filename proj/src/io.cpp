#include "coorbit/io.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace coorbit::io {
namespace {

template <class F>
auto guarded(const char* what, F&& body) -> decltype(body()) {
    try {
        return body();
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::Config, std::string("malformed ") + what + ": " + e.what());
    }
}

Json complex_array(const std::vector<Complex>& v) {
    Json re = Json::array(), im = Json::array();
    for (const auto& z : v) {
        re.push_back(z.real());
        im.push_back(z.imag());
    }
    return Json{{"re", std::move(re)}, {"im", std::move(im)}};
}

std::vector<Complex> complex_from(const Json& j) {
    const auto& re = j.at("re");
    const auto& im = j.at("im");
    if (re.size() != im.size()) fail(ErrorCode::Config, "real and imaginary parts differ in length");
    std::vector<Complex> out(re.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = Complex(re[i].get<double>(), im[i].get<double>());
    return out;
}

const char* weight_kind_name(WeightSpec::Kind k) {
    switch (k) {
        case WeightSpec::Kind::PolynomialPhase: return "polynomial";
        case WeightSpec::Kind::PowerScale: return "power_scale";
        case WeightSpec::Kind::Constant: return "constant";
    }
    return "constant";
}

double parse_number(const std::string& text, const std::string& field) {
    std::size_t used = 0;
    double v = 0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != text.size()) fail(ErrorCode::Config, field + ": '" + text + "' is not a number");
    return v;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace

Json number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return v;
}

double number_from(const Json& j) {
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "inf") return kInf;
        if (s == "-inf") return -kInf;
        if (s == "nan") return std::nan("");
        fail(ErrorCode::Config, "expected a number, got '" + s + "'");
    }
    return j.get<double>();
}

Json versions() { return Json{{"coorbit", kLibraryVersion}, {"format", kFormatVersion}}; }

Json to_json(const SignalGrid& f) {
    Json j{{"d", f.d}, {"offset", f.offset}, {"spacing", f.spacing}, {"n", f.size()}};
    j["values"] = complex_array(f.values);
    return j;
}

SignalGrid signal_from_json(const Json& j) {
    return guarded("signal", [&] {
        SignalGrid f(j.at("offset").get<double>(), j.at("spacing").get<double>(), j.at("n").get<std::size_t>());
        if (j.value("d", 1) != 1) fail(ErrorCode::UnsupportedDimension, "signals are implemented for d = 1");
        if (j.contains("values")) {
            auto v = complex_from(j.at("values"));
            if (v.size() != f.size()) fail(ErrorCode::Config, "signal has " + std::to_string(v.size()) + " values, expected n");
            f.values = std::move(v);
        }
        return f;
    });
}

Json to_json(const WindowSpec& w) {
    Json j{{"kind", w.kind == WindowSpec::Kind::Gaussian ? "gaussian" : w.kind == WindowSpec::Kind::MeyerBandlimited ? "meyer" : "custom"},
           {"scale", w.scale}};
    if (w.kind == WindowSpec::Kind::CustomGrid) j["samples"] = to_json(w.samples);
    return j;
}

WindowSpec window_from_json(const Json& j) {
    return guarded("window", [&] {
        if (j.is_string()) return parse_window(j.get<std::string>());
        const auto kind = j.at("kind").get<std::string>();
        if (kind == "custom") return WindowSpec::custom(signal_from_json(j.at("samples")));
        WindowSpec w = parse_window(kind);
        w.scale = j.value("scale", 1.0);
        if (!(w.scale > 0)) fail(ErrorCode::Config, "window scale must be positive");
        return w;
    });
}

Json to_json(const WeightSpec& w) {
    return Json{{"kind", weight_kind_name(w.kind)}, {"param", w.param}, {"symmetrized", w.symmetrized}, {"group", to_json(w.group)}};
}

WeightSpec weight_from_json(const Json& j) {
    return guarded("weight", [&] {
        const auto kind = j.at("kind").get<std::string>();
        const double param = j.at("param").get<double>();
        WeightSpec w;
        if (kind == "polynomial") w = WeightSpec::polynomial(param);
        else if (kind == "power_scale") w = WeightSpec::power_scale(param);
        else if (kind == "constant") w = WeightSpec::constant(param);
        else fail(ErrorCode::Config, "unknown weight kind '" + kind + "'");
        if (j.contains("group")) w.group = group_from_json(j.at("group"));
        if (j.value("symmetrized", false)) w = symmetrize_weight(w, w.group);
        return w;
    });
}

WeightSpec parse_weight(const std::string& text) {
    const std::string t = trim(text);
    if (t == "constant" || t.empty()) return WeightSpec::constant();
    const auto eq = t.find('=');
    if (eq == std::string::npos) fail(ErrorCode::Config, "weight '" + t + "' is not constant, sigma=<r> or s=<v>");
    const std::string key = trim(t.substr(0, eq));
    const double v = parse_number(trim(t.substr(eq + 1)), "weight");
    if (key == "sigma") return WeightSpec::power_scale(v);
    if (key == "s") return WeightSpec::polynomial(v);
    fail(ErrorCode::Config, "weight '" + t + "' is not constant, sigma=<r> or s=<v>");
}

Json to_json(const GroupSpec& g) { return Json{{"kind", group_name(g.kind)}, {"d", g.d}}; }

GroupSpec group_from_json(const Json& j) {
    return guarded("group", [&] { return GroupSpec{parse_group_kind(j.at("kind").get<std::string>()), j.value("d", 1)}; });
}

Json to_json(const Neighborhood& U) {
    Json j{{"group", to_json(U.spec)}, {"a", U.a}};
    if (U.spec.kind == GroupKind::Heisenberg) j["a_freq"] = U.a_freq;
    else j["b"] = U.b;
    return j;
}

Json to_json(const GridAxis& a) {
    return Json{{"kind", a.kind == GridAxis::Kind::Uniform ? "uniform" : "geometric"},
                {"start", a.start},
                {"step", a.step},
                {"n", a.n},
                {"period", a.period}};
}

GridAxis axis_from_json(const Json& j) {
    return guarded("axis", [&] {
        const auto kind = j.at("kind").get<std::string>();
        const auto n = j.at("n").get<std::size_t>();
        if (kind == "uniform") return GridAxis::uniform(j.at("start").get<double>(), j.at("step").get<double>(), n, j.value("period", 0.0));
        if (kind == "geometric") {
            const double step = j.at("step").get<double>();
            if (!(step > 0)) fail(ErrorCode::Config, "geometric axis needs a positive step");
            return GridAxis::geometric(j.at("start").get<double>(), static_cast<int>(std::lround(1.0 / step)), n);
        }
        fail(ErrorCode::Config, "unknown axis kind '" + kind + "'");
    });
}

Json to_json(const GroupGridFn& F) {
    Json j{{"group", to_json(F.spec)}, {"x", to_json(F.x)}, {"y", to_json(F.y)}};
    j["values"] = complex_array(F.values);
    return j;
}

GroupGridFn group_grid_from_json(const Json& j) {
    return guarded("group grid function", [&] {
        GroupGridFn F(group_from_json(j.at("group")), axis_from_json(j.at("x")), axis_from_json(j.at("y")));
        auto v = complex_from(j.at("values"));
        if (v.size() != F.size()) fail(ErrorCode::Config, "grid function has the wrong number of values");
        F.values = std::move(v);
        return F;
    });
}

Json to_json(const PointFamily& fam) {
    Json j{{"group", to_json(fam.spec)}};
    std::visit(
        [&](const auto& g) {
            using G = std::decay_t<decltype(g)>;
            if constexpr (std::is_same_v<G, GaborLattice>) {
                j["generator"] = Json{{"kind", "gabor_lattice"}, {"alpha", g.alpha}, {"beta", g.beta}, {"m_lo", g.m_lo},
                                      {"m_hi", g.m_hi}, {"n_lo", g.n_lo}, {"n_hi", g.n_hi}};
            } else {
                Json d{{"kind", "dyadic"}, {"j_lo", g.j_lo}, {"j_hi", g.j_hi}, {"k_lo", g.k_lo}, {"k_hi", g.k_hi}, {"step", g.step}};
                if (g.cover) d["cover"] = Json::array({g.cover->first, g.cover->second});
                j["generator"] = d;
            }
        },
        fam.generator);
    Json pts = Json::array();
    for (const auto& p : fam.points) pts.push_back(p.coords);
    j["points"] = std::move(pts);
    return j;
}

PointFamily point_family_from_json(const Json& j) {
    return guarded("point family", [&] {
        if (j.contains("generator")) {
            const auto& g = j.at("generator");
            const auto kind = g.at("kind").get<std::string>();
            PointFamily fam;
            if (kind == "gabor_lattice") {
                fam = make_point_family(GaborLattice{g.at("alpha").get<double>(), g.at("beta").get<double>(), g.at("m_lo").get<int>(),
                                                     g.at("m_hi").get<int>(), g.at("n_lo").get<int>(), g.at("n_hi").get<int>()});
            } else if (kind == "dyadic") {
                DyadicSet d{g.at("j_lo").get<int>(), g.at("j_hi").get<int>(), g.value("k_lo", 0), g.value("k_hi", 0),
                            g.value("step", 1.0), std::nullopt};
                if (g.contains("cover")) d.cover = std::make_pair(g.at("cover")[0].get<double>(), g.at("cover")[1].get<double>());
                fam = make_point_family(d);
            } else {
                fail(ErrorCode::Config, "unknown generator '" + kind + "'");
            }
            if (j.contains("points") && j.at("points").size() != fam.size())
                fail(ErrorCode::Config, "stored points do not match the generator");
            return fam;
        }
        PointFamily fam;
        fam.spec = group_from_json(j.at("group"));
        for (const auto& p : j.at("points")) {
            GroupPoint pt(p.get<std::vector<double>>());
            validate_point(fam.spec, pt);
            fam.labels.push_back({static_cast<int>(fam.points.size()), 0});
            fam.points.push_back(std::move(pt));
        }
        return fam;
    });
}

Json to_json(const FrameSystem& sys) {
    Json j{{"window", to_json(sys.window)}, {"family", to_json(sys.family)}};
    Json grid = to_json(sys.grid);
    grid.erase("values");
    j["grid"] = grid;
    if (sys.dual_window) j["dual_window"] = to_json(*sys.dual_window);
    if (!sys.point_duals.empty()) {
        Json duals = Json::array();
        for (const auto& g : sys.point_duals) duals.push_back(complex_array(g.values));
        j["point_duals"] = std::move(duals);
    }
    return j;
}

FrameSystem frame_system_from_json(const Json& j) {
    return guarded("frame system", [&] {
        FrameSystem sys = make_frame_system(window_from_json(j.at("window")), point_family_from_json(j.at("family")),
                                            signal_from_json(j.at("grid")));
        std::optional<SignalGrid> dual;
        std::vector<SignalGrid> duals;
        if (j.contains("dual_window")) dual = signal_from_json(j.at("dual_window"));
        if (j.contains("point_duals"))
            for (const auto& d : j.at("point_duals")) {
                SignalGrid g = sys.grid.zeros_like();
                g.values = complex_from(d);
                sys.grid.require_same_grid(g);
                duals.push_back(std::move(g));
            }
        if (dual || !duals.empty()) attach_duals(sys, dual, duals);
        return sys;
    });
}

Json to_json(const MoleculeFamily& fam) {
    Json j{{"locations", to_json(fam.locations)}};
    Json grid = to_json(fam.members.empty() ? SignalGrid() : fam.members.front());
    grid.erase("values");
    j["grid"] = grid;
    Json members = Json::array();
    for (const auto& m : fam.members) members.push_back(complex_array(m.values));
    j["members"] = std::move(members);
    return j;
}

MoleculeFamily molecule_family_from_json(const Json& j) {
    return guarded("molecule family", [&] {
        const SignalGrid grid = signal_from_json(j.at("grid"));
        std::vector<SignalGrid> members;
        for (const auto& m : j.at("members")) {
            SignalGrid f = grid.zeros_like();
            f.values = complex_from(m);
            grid.require_same_grid(f);
            members.push_back(std::move(f));
        }
        return make_molecule_family(std::move(members), point_family_from_json(j.at("locations")));
    });
}

Json envelope_sidecar(const Envelope& env) {
    return Json{{"amalgam", number(env.amalgam)},
                {"weight", to_json(env.weight)},
                {"U", to_json(env.U)},
                {"truncation_estimate", number(env.truncation_estimate)},
                {"tail_ratio", number(env.tail_ratio)},
                {"finite", env.finite}};
}

Json to_json(const FrameBounds& fb) {
    return Json{{"A_est", number(fb.A_est)},
                {"B_est", number(fb.B_est)},
                {"is_frame", fb.is_frame},
                {"cg_residual", number(fb.cg_residual)},
                {"cg_iterations", fb.cg_iterations}};
}

Json to_json(const Certificate& cert) {
    Json results = Json::array();
    for (const auto& e : cert.results) {
        Json r{{"p", number(e.params.mixed.p)}, {"q", number(e.params.mixed.q)}};
        r["sigma"] = e.params.besov_exponent ? number(*e.params.besov_exponent) : Json(nullptr);
        r["max_ratio"] = number(e.max_ratio);
        r["frame_constant"] = number(e.frame_constant);
        r["bound"] = number(e.bound);
        r["bound_holds"] = e.bound_holds;
        results.push_back(std::move(r));
    }
    return Json{{"granted", cert.granted},
                {"reason", cert.reason},
                {"envelope_norm", number(cert.envelope_norm)},
                {"envelope_tail_ratio", number(cert.envelope_tail_ratio)},
                {"weight", to_json(cert.weight)},
                {"slack", cert.slack},
                {"seed", cert.seed},
                {"signals", cert.signals},
                {"results", std::move(results)},
                {"versions", versions()}};
}

Json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::Config, "cannot read '" + path + "'");
    try {
        return Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        fail(ErrorCode::Config, path + ": " + e.what());
    }
}

void write_json_file(const std::string& path, const Json& j) {
    std::ofstream out(path);
    if (!out) fail(ErrorCode::Config, "cannot write '" + path + "'");
    out << j.dump(2) << '\n';
}

void write_signal_csv(const std::string& path, const SignalGrid& f) {
    std::ofstream out(path);
    if (!out) fail(ErrorCode::Config, "cannot write '" + path + "'");
    out << "t,re,im\n" << std::setprecision(17);
    for (std::size_t n = 0; n < f.size(); ++n) out << f.t(n) << ',' << f.values[n].real() << ',' << f.values[n].imag() << '\n';
}

void write_plot_data(const std::string& path, const GroupGridFn& F, const std::string& value_label) {
    std::ofstream out(path);
    if (!out) fail(ErrorCode::Config, "cannot write '" + path + "'");
    const bool heis = F.spec.kind == GroupKind::Heisenberg;
    out << "# a: x (time units)\n";
    out << (heis ? "# b: omega (cycles per time unit)\n" : "# b: s (scale, dimensionless)\n");
    out << "# v: " << value_label << "\n" << std::setprecision(10);
    for (std::size_t iy = 0; iy < F.ny(); ++iy) {
        for (std::size_t ix = 0; ix < F.nx(); ++ix) out << F.x[ix] << ' ' << F.y[iy] << ' ' << std::abs(F.at(ix, iy)) << '\n';
        out << '\n';
    }
}

std::vector<ConfigEntry> parse_flat_config(const std::string& text, const std::string& source) {
    std::vector<ConfigEntry> out;
    std::istringstream in(text);
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const auto hash = raw.find('#');
        const std::string body = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (body.empty()) continue;
        const auto eq = body.find('=');
        const std::string where = source + ":" + std::to_string(line) + ": ";
        if (eq == std::string::npos) fail(ErrorCode::Config, where + "expected key = value");
        ConfigEntry e{trim(body.substr(0, eq)), trim(body.substr(eq + 1)), line};
        if (e.key.empty()) fail(ErrorCode::Config, where + "missing key");
        if (e.key.find_first_of(" \t") != std::string::npos) fail(ErrorCode::Config, where + "key '" + e.key + "' contains spaces");
        for (const auto& prev : out)
            if (prev.key == e.key)
                fail(ErrorCode::Config, where + "key '" + e.key + "' repeats line " + std::to_string(prev.line));
        out.push_back(std::move(e));
    }
    return out;
}

std::vector<ConfigEntry> read_flat_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::Config, "cannot read config '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_flat_config(ss.str(), path);
}

}  // namespace coorbit::io
