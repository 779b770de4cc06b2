#include <cmath>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>

#include "CLI11.hpp"

#include "coorbit/coorbit_operators.hpp"
#include "coorbit/io.hpp"
#include "coorbit/parallel.hpp"

using namespace coorbit;
using io::Json;

namespace {

constexpr int kPass = 0, kError = 1, kCertifiedFailure = 2;

struct Common {
    std::string config;
    std::string out = ".";
    bool emit_plot = false;
    unsigned threads = 0;
    std::uint64_t seed = 1;
};

struct GridOptions {
    double offset = -8.0;
    double spacing = 1.0 / 64;
    std::size_t n = 1024;
    SignalGrid make() const {
        if (!(spacing > 0) || n < 8) fail(ErrorCode::Config, "grid needs spacing > 0 and at least 8 samples");
        return SignalGrid(offset, spacing, n);
    }
};

struct WindowOptions {
    std::string name = "gaussian";
    double scale = 1.0;
    WindowSpec make() const {
        WindowSpec w = parse_window(name);
        w.scale = scale;
        return w;
    }
};

struct FrameOptions {
    std::string frame_spec;
    std::string group = "heisenberg";
    double alpha = 1.0, beta = 0.5;
    int j_lo = -3, j_hi = 3;
    double step = 0.25;
};

struct Context {
    Common common;
    GridOptions grid;
    WindowOptions window;
    FrameOptions frame;
};

void add_common(CLI::App* sub, Context& ctx) {
    sub->add_option("--config", ctx.common.config, "Flat key = value file; keys are long option names, flags override it");
    sub->add_option("--out", ctx.common.out, "Directory for JSON, CSV and plot files")->capture_default_str();
    sub->add_flag("--emit-plot", ctx.common.emit_plot, "Also write gnuplot-ready 'a b v' data for 2D fields");
    sub->add_option("--threads", ctx.common.threads, "Worker cap; 0 uses every available core")->check(CLI::NonNegativeNumber);
    sub->add_option("--seed", ctx.common.seed, "Seed for generated test signals")->capture_default_str();
}

void add_grid(CLI::App* sub, Context& ctx) {
    sub->add_option("--grid-offset", ctx.grid.offset, "Left end of the periodic signal grid")->capture_default_str();
    sub->add_option("--grid-spacing", ctx.grid.spacing, "Sample spacing")->capture_default_str()->check(CLI::PositiveNumber);
    sub->add_option("--grid-n", ctx.grid.n, "Number of samples")->capture_default_str();
}

// Subcommands default to different windows but share one option slot.
std::map<const CLI::App*, std::string>& window_defaults() {
    static std::map<const CLI::App*, std::string> defaults;
    return defaults;
}

void add_window(CLI::App* sub, Context& ctx, const std::string& fallback) {
    window_defaults()[sub] = fallback;
    sub->add_option("--window", ctx.window.name, "Analyzing window: gaussian or meyer (band-limited wavelet)")
        ->check(CLI::IsMember({"gaussian", "meyer"}));
    sub->add_option("--window-scale", ctx.window.scale, "Dilation of the window, norm preserved")->check(CLI::PositiveNumber);
}

void add_frame(CLI::App* sub, Context& ctx) {
    sub->add_option("--frame-spec", ctx.frame.frame_spec, "Frame system JSON written by dual-window (atoms and dual)");
    sub->add_option("--group", ctx.frame.group, "heisenberg: Gabor lattice; affine: dyadic wavelet family")
        ->capture_default_str()
        ->check(CLI::IsMember({"heisenberg", "affine"}));
    sub->add_option("--alpha", ctx.frame.alpha, "Gabor lattice time step")->capture_default_str()->check(CLI::PositiveNumber);
    sub->add_option("--beta", ctx.frame.beta, "Gabor lattice frequency step")->capture_default_str()->check(CLI::PositiveNumber);
    sub->add_option("--j-lo", ctx.frame.j_lo, "Coarsest dyadic level (scale 2^-j)")->capture_default_str();
    sub->add_option("--j-hi", ctx.frame.j_hi, "Finest dyadic level")->capture_default_str();
    sub->add_option("--step", ctx.frame.step, "Dyadic translation step in units of the scale")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
}

FrameSystem build_frame(const Context& ctx) {
    if (!ctx.frame.frame_spec.empty()) return io::frame_system_from_json(io::read_json_file(ctx.frame.frame_spec));
    const SignalGrid grid = ctx.grid.make();
    if (ctx.frame.group == "heisenberg")
        return make_frame_system(ctx.window.make(), make_point_family(grid_compatible_lattice(grid, ctx.frame.alpha, ctx.frame.beta)), grid);
    return make_frame_system(ctx.window.make(), make_point_family(covering_dyadic_set(grid, ctx.frame.j_lo, ctx.frame.j_hi, ctx.frame.step)),
                             grid);
}

// Three Gaussian packets at seeded positions and frequencies in the central half of the grid.
SignalGrid demo_signal(const SignalGrid& grid, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> pos(-0.25 * grid.period(), 0.25 * grid.period()), freq(-2.0, 2.0);
    std::normal_distribution<double> amp;
    SignalGrid f = grid.zeros_like();
    for (int k = 0; k < 3; ++k) f = f + Complex(amp(rng), amp(rng)) * tf_atom(WindowSpec::gaussian(), grid, pos(rng), freq(rng));
    return f;
}

SignalGrid load_signal(const std::string& path, const Context& ctx) {
    if (path.empty()) return demo_signal(ctx.grid.make(), ctx.common.seed);
    return io::signal_from_json(io::read_json_file(path));
}

std::string out_path(const Context& ctx, const std::string& name) { return (std::filesystem::path(ctx.common.out) / name).string(); }

double parse_exponent(const std::string& s) {
    if (s == "inf" || s == "infinity") return kInf;
    std::size_t used = 0;
    double v = 0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != s.size() || !(v >= 1)) fail(ErrorCode::Config, "exponent '" + s + "' must be a number >= 1 or inf");
    return v;
}

// "1,1;2,2;inf,1" for modulation spaces, "2,2,0;1,1,1" for Besov spaces.
std::vector<std::vector<double>> parse_triples(const std::string& text, std::size_t arity) {
    std::vector<std::vector<double>> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ';')) {
        std::vector<double> t;
        std::stringstream is(item);
        std::string tok;
        while (std::getline(is, tok, ',')) {
            tok.erase(0, tok.find_first_not_of(' '));
            tok.erase(tok.find_last_not_of(' ') + 1);
            if (t.size() < 2) t.push_back(parse_exponent(tok));
            else t.push_back(std::stod(tok));
        }
        if (t.size() != arity) fail(ErrorCode::Config, "parameter entry '" + item + "' needs " + std::to_string(arity) + " values");
        out.push_back(std::move(t));
    }
    if (out.empty()) fail(ErrorCode::Config, "no parameters given");
    return out;
}

void maybe_plot(const Context& ctx, const std::string& name, const GroupGridFn& F, const std::string& label) {
    if (ctx.common.emit_plot) io::write_plot_data(out_path(ctx, name), F, label);
}

int report(const Json& j, const Context& ctx, const std::string& name, int code) {
    io::write_json_file(out_path(ctx, name), j);
    std::cout << name << ": " << (code == kPass ? "pass" : "certified failure") << "\n";
    return code;
}

// Subcommands ---------------------------------------------------------------

struct Registry {
    std::map<CLI::App*, std::function<int()>> handlers;
};

void cmd_stft(CLI::App& app, Context& ctx, Registry& reg) {
    auto* sub = app.add_subcommand("stft", "Short-time Fourier transform on the phase plane");
    add_common(sub, ctx);
    add_grid(sub, ctx);
    add_window(sub, ctx, "gaussian");
    auto signal = std::make_shared<std::string>();
    auto phase = std::make_shared<PhaseGridSpec>();
    sub->add_option("--signal", *signal, "Signal JSON; a seeded packet sum when omitted");
    sub->add_option("--dx", phase->dx, "Time step of the phase grid")->capture_default_str()->check(CLI::PositiveNumber);
    sub->add_option("--domega", phase->domega, "Frequency step of the phase grid")->capture_default_str()->check(CLI::PositiveNumber);
    sub->add_option("--omega-max", phase->omega_max, "Frequency range [-max, max)")->capture_default_str()->check(CLI::PositiveNumber);
    reg.handlers[sub] = [&ctx, signal, phase] {
        Warnings w;
        const auto V = stft(load_signal(*signal, ctx), ctx.window.make(), *phase, &w);
        Json j = io::to_json(V);
        j["window"] = io::to_json(ctx.window.make());
        j["warnings"] = w;
        maybe_plot(ctx, "stft.dat", V, "|V_g f|");
        return report(j, ctx, "stft.json", kPass);
    };
}

void cmd_cwt(CLI::App& app, Context& ctx, Registry& reg) {
    auto* sub = app.add_subcommand("cwt", "Continuous wavelet transform on the affine group");
    add_common(sub, ctx);
    add_grid(sub, ctx);
    add_window(sub, ctx, "meyer");
    auto signal = std::make_shared<std::string>();
    auto scales = std::make_shared<ScaleGridSpec>();
    sub->add_option("--signal", *signal, "Signal JSON; a seeded packet sum when omitted");
    sub->add_option("--s-min", scales->s_min, "Finest scale")->capture_default_str()->check(CLI::PositiveNumber);
    sub->add_option("--s-max", scales->s_max, "Coarsest scale")->capture_default_str()->check(CLI::PositiveNumber);
    sub->add_option("--voices", scales->voices, "Scales per octave")->capture_default_str()->check(CLI::PositiveNumber);
    reg.handlers[sub] = [&ctx, signal, scales] {
        Warnings w;
        const auto W = cwt(load_signal(*signal, ctx), ctx.window.make(), *scales, &w);
        Json j = io::to_json(W);
        j["window"] = io::to_json(ctx.window.make());
        j["warnings"] = w;
        maybe_plot(ctx, "cwt.dat", W, "|W_g f|");
        return report(j, ctx, "cwt.json", kPass);
    };
}

void cmd_frame_bounds(CLI::App& app, Context& ctx, Registry& reg) {
    auto* sub = app.add_subcommand("frame-bounds", "Frame bounds of a discrete atom family; near-singular families fail");
    add_common(sub, ctx);
    add_grid(sub, ctx);
    add_window(sub, ctx, "gaussian");
    add_frame(sub, ctx);
    auto ratio = std::make_shared<double>(0.05);
    sub->add_option("--singular-ratio", *ratio, "Families with A < ratio * B are reported near-singular")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    reg.handlers[sub] = [&ctx, ratio] {
        const auto sys = build_frame(ctx);
        const auto fb = frame_bounds(sys);
        const bool near_singular = fb.A_est < *ratio * fb.B_est;
        Json j = io::to_json(fb);
        j["near_singular"] = near_singular;
        j["points"] = sys.family.size();
        return report(j, ctx, "frame_bounds.json", fb.is_frame && !near_singular ? kPass : kCertifiedFailure);
    };
}

void cmd_dual_window(CLI::App& app, Context& ctx, Registry& reg) {
    auto* sub = app.add_subcommand("dual-window", "Canonical dual of a frame; writes a reloadable frame system");
    add_common(sub, ctx);
    add_grid(sub, ctx);
    add_window(sub, ctx, "gaussian");
    add_frame(sub, ctx);
    reg.handlers[sub] = [&ctx] {
        auto sys = build_frame(ctx);
        const auto gamma = dual_window(sys);
        io::write_signal_csv(out_path(ctx, "dual_window.csv"), gamma);
        io::write_json_file(out_path(ctx, "frame_system.json"), io::to_json(sys));
        Json j{{"points", sys.family.size()}, {"dual_norm", gamma.norm()}, {"frame_system", "frame_system.json"}};
        return report(j, ctx, "dual_window.json", kPass);
    };
}

MoleculeFamily family_or_atoms(const std::string& path, const Context& ctx, const FrameSystem* sys) {
    if (!path.empty()) return io::molecule_family_from_json(io::read_json_file(path));
    return atom_family(sys->window, sys->family, sys->grid);
}

void cmd_envelope(CLI::App& app, Context& ctx, Registry& reg) {
    auto* sub = app.add_subcommand("envelope", "Minimal common envelope of a molecule family and its amalgam norm");
    add_common(sub, ctx);
    add_grid(sub, ctx);
    add_window(sub, ctx, "gaussian");
    add_frame(sub, ctx);
    auto family = std::make_shared<std::string>();
    auto weight = std::make_shared<std::string>("constant");
    sub->add_option("--family", *family, "Molecule family JSON; the frame atoms when omitted");
    sub->add_option("--weight", *weight, "constant, sigma=<r> (scale power) or s=<v> (polynomial)")->capture_default_str();
    reg.handlers[sub] = [&ctx, family, weight] {
        std::optional<FrameSystem> sys;
        if (family->empty()) sys = build_frame(ctx);
        const auto fam = family_or_atoms(*family, ctx, sys ? &*sys : nullptr);
        const auto env = envelope_extract(fam, ctx.window.make(), default_neighborhood(fam.group), io::parse_weight(*weight));
        io::write_json_file(out_path(ctx, "envelope.json"), io::to_json(env.H));
        maybe_plot(ctx, "envelope.dat", env.H, "envelope H");
        return report(io::envelope_sidecar(env), ctx, "envelope.sidecar.json", env.finite ? kPass : kCertifiedFailure);
    };
}

void cmd_molecule_check(CLI::App& app, Context& ctx, Registry& reg) {
    auto* sub = app.add_subcommand("molecule-check", "Checks that a family is dominated by one translated envelope");
    add_common(sub, ctx);
    add_window(sub, ctx, "meyer");
    auto family = std::make_shared<std::string>();
    auto weight = std::make_shared<std::string>("constant");
    auto envelope = std::make_shared<std::string>();
    auto slack = std::make_shared<double>(1.0 + 1e-9);
    sub->add_option("--family", *family, "Molecule family JSON")->required();
    sub->add_option("--weight", *weight, "constant, sigma=<r> (scale power) or s=<v> (polynomial)")->capture_default_str();
    sub->add_option("--envelope", *envelope, "Envelope grid function JSON; extracted from the family when omitted");
    sub->add_option("--slack", *slack, "Tolerance factor on the domination inequality")->capture_default_str()->check(CLI::PositiveNumber);
    reg.handlers[sub] = [&ctx, family, weight, envelope, slack] {
        const auto fam = io::molecule_family_from_json(io::read_json_file(*family));
        const auto g = ctx.window.make();
        const auto w = io::parse_weight(*weight);
        const auto U = default_neighborhood(fam.group);
        const Envelope env = envelope->empty() ? envelope_extract(fam, g, U, w)
                                               : make_envelope(io::group_grid_from_json(io::read_json_file(*envelope)), U, w);
        const auto verdict = verify_molecule(fam, g, env, *slack);
        Json j{{"ok", verdict.ok},
               {"worst_ratio", io::number(verdict.worst_ratio)},
               {"worst_member", verdict.worst_member},
               {"worst_point", verdict.worst_point.coords},
               {"slack", *slack},
               {"envelope", io::envelope_sidecar(env)}};
        maybe_plot(ctx, "envelope.dat", env.H, "envelope H");
        return report(j, ctx, "molecule_check.json", verdict.ok && env.finite ? kPass : kCertifiedFailure);
    };
}

void cmd_classical_check(CLI::App& app, Context& ctx, Registry& reg) {
    auto* sub = app.add_subcommand("classical-check",
                                   "Builds dyadic (M, N)-molecules, checks decay and moments, and fits a wavelet-domain envelope");
    add_common(sub, ctx);
    add_grid(sub, ctx);
    add_window(sub, ctx, "meyer");
    struct Opts {
        int M = 4, N = 2, j_lo = 0, j_hi = 0, k_lo = 0, k_hi = 0;
        double sigma = 0.0;
        std::string family_out;
    };
    auto o = std::make_shared<Opts>();
    sub->add_option("-M,--decay", o->M, "Decay order M")->capture_default_str();
    sub->add_option("-N,--moments", o->N, "Vanishing moments through order N")->capture_default_str();
    sub->add_option("--cube-j-lo", o->j_lo, "Coarsest cube level")->capture_default_str();
    sub->add_option("--cube-j-hi", o->j_hi, "Finest cube level")->capture_default_str();
    sub->add_option("--cube-k-lo", o->k_lo, "First cube index")->capture_default_str();
    sub->add_option("--cube-k-hi", o->k_hi, "Last cube index")->capture_default_str();
    sub->add_option("--sigma", o->sigma, "Smoothness of the target Besov scale (envelope weight s^-sigma)")->capture_default_str();
    sub->add_option("--family-out", o->family_out, "Also write the molecule family JSON here");
    reg.handlers[sub] = [&ctx, o] {
        const auto grid = ctx.grid.make();
        const DyadicSet cubes{o->j_lo, o->j_hi, o->k_lo, o->k_hi, 1.0, std::nullopt};
        const auto fam = classical_family(o->M, o->N, cubes, grid);
        if (!o->family_out.empty()) io::write_json_file(o->family_out, io::to_json(fam));
        bool pass = true;
        Json members = Json::array();
        for (std::size_t i = 0; i < fam.size(); ++i) {
            const ClassicalMoleculeParams p{o->M, o->N, fam.locations.labels[i][0], fam.locations.labels[i][1]};
            const auto c = classical_molecule_check(fam.members[i], p);
            pass = pass && c.decay_ok && c.moments_ok;
            members.push_back(Json{{"j", p.j},
                                   {"k", p.k},
                                   {"decay_ok", c.decay_ok},
                                   {"moments_ok", c.moments_ok},
                                   {"worst_decay_ratio", io::number(c.worst_decay_ratio)},
                                   {"worst_moment_ratio", io::number(c.worst_moment_ratio)},
                                   {"details", c.details}});
        }
        Json j{{"M", o->M}, {"N", o->N}, {"sigma", o->sigma}, {"members", members}};
        try {
            const auto bridge = classical_to_coorbit(fam, ctx.window.make(), o->sigma);
            j["exponents"] = Json{{"alpha", bridge.exponents.alpha}, {"beta", bridge.exponents.beta}, {"gamma", bridge.exponents.gamma}};
            j["constant"] = io::number(bridge.constant);
            j["envelope"] = io::envelope_sidecar(bridge.envelope);
            j["verified"] = bridge.verdict.ok;
            j["worst_ratio"] = io::number(bridge.verdict.worst_ratio);
            pass = pass && bridge.verdict.ok && bridge.envelope.finite;
        } catch (const CoorbitError& e) {
            if (e.code() != ErrorCode::InfiniteEnvelope) throw;
            j["envelope_error"] = e.what();
            pass = false;
        }
        return report(j, ctx, "classical_check.json", pass ? kPass : kCertifiedFailure);
    };
}

void cmd_amalgam_norm(CLI::App& app, Context& ctx, Registry& reg) {
    auto* sub = app.add_subcommand("amalgam-norm", "Weighted Wiener amalgam norm of a grid function via its local maximum function");
    add_common(sub, ctx);
    struct Opts {
        std::string function, weight = "constant", side = "right";
        double a = 0.5, b = 2.0;
    };
    auto o = std::make_shared<Opts>();
    sub->add_option("--function", o->function, "Group grid function JSON")->required();
    sub->add_option("--weight", o->weight, "constant, sigma=<r> (scale power) or s=<v> (polynomial)")->capture_default_str();
    sub->add_option("--side", o->side, "right: reversed translation; left: ordinary translation")
        ->capture_default_str()
        ->check(CLI::IsMember({"left", "right"}));
    sub->add_option("--U-a", o->a, "Neighborhood half-width in x (and frequency)")->capture_default_str()->check(CLI::PositiveNumber);
    sub->add_option("--U-b", o->b, "Neighborhood scale ratio (affine group)")->capture_default_str()->check(CLI::PositiveNumber);
    reg.handlers[sub] = [&ctx, o] {
        const auto F = io::group_grid_from_json(io::read_json_file(o->function));
        const Neighborhood U = F.spec.kind == GroupKind::Heisenberg ? Neighborhood::heisenberg_cube(o->a) : Neighborhood::affine(o->a, o->b);
        const Side side = o->side == "left" ? Side::Left : Side::Right;
        const auto rep = amalgam_report(F, U, io::parse_weight(o->weight), side);
        Json j{{"norm", io::number(rep.norm)},
               {"tail_ratio", io::number(rep.tail_ratio)},
               {"truncation_estimate", io::number(rep.truncation_estimate)},
               {"finite", rep.finite},
               {"side", o->side},
               {"U", io::to_json(U)}};
        if (ctx.common.emit_plot) io::write_plot_data(out_path(ctx, "local_max.dat"), local_max(F, U, side), "local maximum");
        return report(j, ctx, "amalgam.json", rep.finite ? kPass : kCertifiedFailure);
    };
}

void cmd_besov_norm(CLI::App& app, Context& ctx, Registry& reg) {
    auto* sub = app.add_subcommand("besov-norm", "Homogeneous Besov norm by Littlewood-Paley pieces and by the wavelet transform");
    add_common(sub, ctx);
    add_grid(sub, ctx);
    add_window(sub, ctx, "meyer");
    struct Opts {
        std::string signal, p = "2", q = "2";
        double sigma = 0.0;
    };
    auto o = std::make_shared<Opts>();
    sub->add_option("--signal", o->signal, "Signal JSON; a seeded packet sum when omitted");
    sub->add_option("--p", o->p, "Integrability exponent (number >= 1 or inf)")->capture_default_str();
    sub->add_option("--q", o->q, "Summability exponent over scales (number >= 1 or inf)")->capture_default_str();
    sub->add_option("--sigma", o->sigma, "Smoothness")->capture_default_str();
    reg.handlers[sub] = [&ctx, o] {
        const auto f = load_signal(o->signal, ctx);
        const double p = parse_exponent(o->p), q = parse_exponent(o->q);
        Warnings w;
        const double lp = besov_norm_lp(f, p, q, o->sigma, &w);
        const double wt = besov_norm_cwt(f, p, q, o->sigma, ctx.window.make());
        Json j{{"p", io::number(p)},          {"q", io::number(q)},
               {"sigma", o->sigma},           {"littlewood_paley", io::number(lp)},
               {"wavelet", io::number(wt)},   {"pieces", Json::array()},
               {"warnings", w}};
        for (double v : lp_piece_norms(f, p)) j["pieces"].push_back(io::number(v));
        return report(j, ctx, "besov_norm.json", kPass);
    };
}

void cmd_modulation_norm(CLI::App& app, Context& ctx, Registry& reg) {
    auto* sub = app.add_subcommand("modulation-norm", "Weighted mixed norm of the short-time Fourier transform");
    add_common(sub, ctx);
    add_grid(sub, ctx);
    add_window(sub, ctx, "gaussian");
    struct Opts {
        std::string signal, p = "2", q = "2", weight = "constant";
    };
    auto o = std::make_shared<Opts>();
    sub->add_option("--signal", o->signal, "Signal JSON; a seeded packet sum when omitted");
    sub->add_option("--p", o->p, "Integrability in time (number >= 1 or inf)")->capture_default_str();
    sub->add_option("--q", o->q, "Integrability in frequency (number >= 1 or inf)")->capture_default_str();
    sub->add_option("--weight", o->weight, "constant or s=<v> (polynomial)")->capture_default_str();
    reg.handlers[sub] = [&ctx, o] {
        const auto f = load_signal(o->signal, ctx);
        const auto params = CoorbitParams::modulation(parse_exponent(o->p), parse_exponent(o->q), io::parse_weight(o->weight), ctx.window.make());
        Json j{{"p", io::number(params.mixed.p)},
               {"q", io::number(params.mixed.q)},
               {"weight", io::to_json(params.mixed.weight)},
               {"norm", io::number(modulation_norm(f, params))},
               {"l2_norm", f.norm()}};
        return report(j, ctx, "modulation_norm.json", kPass);
    };
}

GroupGridFn named_symbol(const std::string& kind, const SignalGrid& grid, double radius, double freq) {
    auto sym = symbol_grid(grid);
    const auto bump = [](double u) { return std::abs(u) < 1 ? std::exp(-1.0 / (1.0 - u * u)) : 0.0; };
    for (std::size_t j = 0; j < sym.ny(); ++j)
        for (std::size_t i = 0; i < sym.nx(); ++i) {
            if (kind == "one") sym.at(i, j) = 1.0;
            else if (kind == "bump") sym.at(i, j) = bump(sym.x[i] / radius) * bump(sym.y[j] / radius);
            else if (kind == "plane-wave") sym.at(i, j) = std::polar(1.0, 2 * M_PI * freq * sym.x[i]);
            else fail(ErrorCode::Config, "unknown symbol '" + kind + "'");
        }
    return sym;
}

struct SymbolOptions {
    std::string file, kind = "bump";
    double radius = 2.0, freq = 3.75;
};

void add_symbol(CLI::App* sub, SymbolOptions& s) {
    sub->add_option("--symbol", s.file, "Phase-plane symbol JSON; overrides --symbol-kind");
    sub->add_option("--symbol-kind", s.kind, "one (identity), bump (smooth, compact support) or plane-wave in x")
        ->capture_default_str()
        ->check(CLI::IsMember({"one", "bump", "plane-wave"}));
    sub->add_option("--radius", s.radius, "Support radius of the bump symbol")->capture_default_str()->check(CLI::PositiveNumber);
    sub->add_option("--wave-freq", s.freq, "Frequency of the plane-wave symbol")->capture_default_str();
}

GroupGridFn load_symbol(const SymbolOptions& s, const SignalGrid& grid) {
    if (!s.file.empty()) return io::group_grid_from_json(io::read_json_file(s.file));
    return named_symbol(s.kind, grid, s.radius, s.freq);
}

void cmd_weyl_apply(CLI::App& app, Context& ctx, Registry& reg) {
    auto* sub = app.add_subcommand("weyl-apply", "Weyl quantization of a phase-plane symbol applied to a signal");
    add_common(sub, ctx);
    add_grid(sub, ctx);
    auto s = std::make_shared<SymbolOptions>();
    auto signal = std::make_shared<std::string>();
    add_symbol(sub, *s);
    sub->add_option("--signal", *signal, "Signal JSON; a seeded packet sum when omitted");
    reg.handlers[sub] = [&ctx, s, signal] {
        const auto f = load_signal(*signal, ctx);
        const auto sym = load_symbol(*s, f);
        const WeylOperator op(sym, f);
        const auto out = op.apply(f);
        io::write_signal_csv(out_path(ctx, "weyl_output.csv"), out);
        maybe_plot(ctx, "symbol.dat", sym, "|symbol|");
        Json j{{"warnings", op.warnings()},
               {"aliasing_fraction", op.aliasing_fraction()},
               {"active_shifts", op.active_shifts()},
               {"output", io::to_json(out)}};
        return report(j, ctx, "weyl.json", op.warnings().empty() ? kPass : kCertifiedFailure);
    };
}

// Certificates --------------------------------------------------------------

Json certificate_report(const Certificate& cert, const Envelope& env) {
    Json j = io::to_json(cert);
    j["envelope"] = io::envelope_sidecar(env);
    return j;
}

void cmd_certify(CLI::App& app, Context& ctx, Registry& reg) {
    auto* sub = app.add_subcommand("certify", "Boundedness certificate for an operator whose atom images are molecules");
    add_common(sub, ctx);
    add_grid(sub, ctx);
    struct Opts {
        std::string op = "identity", params, frame_spec;
        int signals = 30;
        SymbolOptions symbol;
    };
    auto o = std::make_shared<Opts>();
    sub->add_option("--op", o->op,
                    "identity or weyl (Gabor frame, modulation spaces); hilbert (wavelet frame, Besov spaces); "
                    "fattened (identity plus slowly decaying tails)")
        ->capture_default_str()
        ->check(CLI::IsMember({"identity", "weyl", "hilbert", "fattened"}));
    sub->add_option("--params", o->params,
                    "Spaces to certify: 'p,q;...' for modulation spaces or 'p,q,sigma;...' for Besov spaces; "
                    "all entries must share one weight");
    sub->add_option("--frame-spec", o->frame_spec, "Frame system JSON written by dual-window");
    sub->add_option("--signals", o->signals, "Number of seeded test signals")->capture_default_str()->check(CLI::PositiveNumber);
    add_symbol(sub, o->symbol);
    reg.handlers[sub] = [&ctx, o] {
        const bool besov = o->op == "hilbert";
        FrameSystem sys;
        if (!o->frame_spec.empty()) {
            sys = io::frame_system_from_json(io::read_json_file(o->frame_spec));
        } else {
            const auto grid = ctx.grid.make();
            sys = besov ? make_frame_system(WindowSpec::meyer(), make_point_family(covering_dyadic_set(grid, -3, 3, 0.25)), grid)
                        : make_frame_system(WindowSpec::gaussian(), make_point_family(grid_compatible_lattice(grid, 1.0, 0.5)), grid);
        }
        if (!sys.has_duals()) dual_window(sys);
        if (besov != (sys.spec.kind == GroupKind::Affine))
            fail(ErrorCode::Config, "operator '" + o->op + "' needs a " + (besov ? "wavelet" : "Gabor") + " frame");

        std::vector<CoorbitParams> params;
        const std::string spec_text = o->params.empty() ? (besov ? "2,2,0" : "1,1;2,2;inf,1") : o->params;
        for (const auto& t : parse_triples(spec_text, besov ? 3 : 2))
            params.push_back(besov ? CoorbitParams::besov(t[0], t[1], t[2]) : CoorbitParams::modulation(t[0], t[1]));

        MoleculeFamily images;
        if (o->op == "identity") {
            images = operator_images(sys, [](const SignalGrid& f) { return f; });
        } else if (o->op == "hilbert") {
            images = operator_images(sys, hilbert);
        } else if (o->op == "weyl") {
            const auto check = weyl_tf_molecule_check(load_symbol(o->symbol, sys.grid), sys);
            if (check.declined) {
                Json j{{"granted", false}, {"reason", check.reason}, {"warnings", check.warnings}, {"versions", io::versions()}};
                return report(j, ctx, "certificate.json", kCertifiedFailure);
            }
            images = check.images;
        } else {
            images = operator_images(sys, [](const SignalGrid& f) {
                double peak = 0;
                std::size_t at = 0;
                for (std::size_t n = 0; n < f.size(); ++n)
                    if (std::abs(f.values[n]) > peak) peak = std::abs(f.values[n]), at = n;
                const double centre = f.t(at);
                return f + SignalGrid::from_function(f.offset, f.spacing, f.size(), [&](double t) {
                           double d = t - centre;
                           d -= f.period() * std::round(d / f.period());
                           return 0.5 / std::sqrt(1 + std::abs(d));
                       });
            });
        }
        const auto env = certificate_envelope(sys, images, params.front().mixed.weight);
        const auto cert = boundedness_certificate(sys, images, env, params, ctx.common.seed, o->signals);
        maybe_plot(ctx, "envelope.dat", env.H, "envelope H");
        Json j = certificate_report(cert, env);
        j["op"] = o->op;
        return report(j, ctx, "certificate.json", cert.granted ? kPass : kCertifiedFailure);
    };
}

void cmd_hilbert_demo(CLI::App& app, Context& ctx, Registry& reg) {
    auto* sub = app.add_subcommand("hilbert-demo", "Hilbert transform on a homogeneous Besov space through Meyer wavelet molecules");
    add_common(sub, ctx);
    add_grid(sub, ctx);
    struct Opts {
        std::string p = "2", q = "2";
        double sigma = 0.0;
        int signals = 30;
    };
    auto o = std::make_shared<Opts>();
    sub->add_option("--p", o->p, "Integrability exponent (number >= 1 or inf)")->capture_default_str();
    sub->add_option("--q", o->q, "Summability exponent over scales (number >= 1 or inf)")->capture_default_str();
    sub->add_option("--sigma", o->sigma, "Smoothness")->capture_default_str();
    sub->add_option("--signals", o->signals, "Number of seeded test signals")->capture_default_str()->check(CLI::PositiveNumber);
    reg.handlers[sub] = [&ctx, o] {
        const auto grid = ctx.grid.make();
        auto sys = make_frame_system(WindowSpec::meyer(), make_point_family(covering_dyadic_set(grid, -3, 3, 0.25)), grid);
        dual_window(sys);
        const auto images = operator_images(sys, hilbert);
        const auto params = CoorbitParams::besov(parse_exponent(o->p), parse_exponent(o->q), o->sigma);
        const auto env = certificate_envelope(sys, images, params.mixed.weight);
        const auto verdict = verify_molecule(images, sys.window, env, 1 + 1e-9);
        const auto cert = boundedness_certificate(sys, images, env, {params}, ctx.common.seed, o->signals);

        // The L2-equivalent Besov norm is preserved by the Hilbert transform.
        const auto flat = CoorbitParams::besov(2, 2, 0);
        double deviation = 0;
        for (const auto& f : certificate_signals(sys, ctx.common.seed, 5)) {
            const double nf = coorbit_norm(f, flat);
            if (nf > 0) deviation = std::max(deviation, std::abs(coorbit_norm(hilbert(f), flat) / nf - 1));
        }
        maybe_plot(ctx, "envelope.dat", env.H, "envelope H");
        Json j = certificate_report(cert, env);
        j["images_are_molecules"] = verdict.ok && env.finite;
        j["worst_molecule_ratio"] = io::number(verdict.worst_ratio);
        j["isometry_deviation"] = deviation;
        return report(j, ctx, "hilbert_demo.json", cert.granted && verdict.ok ? kPass : kCertifiedFailure);
    };
}

// Config values fill options that were not given on the command line.
void apply_config(CLI::App* sub, const std::string& path) {
    for (const auto& e : io::read_flat_config(path)) {
        const std::string where = path + ":" + std::to_string(e.line) + ": ";
        CLI::Option* opt = e.key == "config" ? nullptr : sub->get_option_no_throw("--" + e.key);
        if (!opt) fail(ErrorCode::Config, where + "unknown key '" + e.key + "' for " + sub->get_name());
        if (opt->count() > 0) continue;
        try {
            opt->add_result(e.value);
            opt->run_callback();
        } catch (const CLI::Error& err) {
            fail(ErrorCode::Config, where + "bad value for '" + e.key + "': " + err.what());
        }
    }
}

int exit_code_for(ErrorCode code) {
    switch (code) {
        case ErrorCode::NotAFrame:
        case ErrorCode::IllConditioned:
        case ErrorCode::InfiniteEnvelope:
        case ErrorCode::HypothesisViolation: return kCertifiedFailure;
        default: return kError;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Coorbit spaces on the Heisenberg and affine groups: transforms, frames, molecules and operator certificates.\n"
                 "Exit status: 0 pass, 2 certified failure (not a frame, not molecules, bound or check failed), 1 error."};
    app.require_subcommand(1);
    app.set_version_flag("--version", io::kLibraryVersion);
    Context ctx;
    Registry reg;
    cmd_stft(app, ctx, reg);
    cmd_cwt(app, ctx, reg);
    cmd_frame_bounds(app, ctx, reg);
    cmd_dual_window(app, ctx, reg);
    cmd_envelope(app, ctx, reg);
    cmd_molecule_check(app, ctx, reg);
    cmd_classical_check(app, ctx, reg);
    cmd_amalgam_norm(app, ctx, reg);
    cmd_besov_norm(app, ctx, reg);
    cmd_modulation_norm(app, ctx, reg);
    cmd_weyl_apply(app, ctx, reg);
    cmd_certify(app, ctx, reg);
    cmd_hilbert_demo(app, ctx, reg);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kError;
    }

    CLI::App* sub = app.get_subcommands().front();
    const auto fallback = window_defaults().find(sub);
    if (fallback != window_defaults().end() && sub->get_option("--window")->count() == 0) ctx.window.name = fallback->second;
    try {
        if (!ctx.common.config.empty()) apply_config(sub, ctx.common.config);
        set_thread_count(ctx.common.threads);
        std::filesystem::create_directories(ctx.common.out);
        return reg.handlers.at(sub)();
    } catch (const CoorbitError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kError;
    }
}
