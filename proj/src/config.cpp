#include "simqd/config.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include "json.hpp"

#include "simqd/constants.hpp"
#include "simqd/errors.hpp"

namespace simqd {

using nlohmann::json;

namespace {

struct UnitTag {
    std::string_view tag;
    UnitKind kind;
    int pow10;
    double factor;
};

constexpr std::array kUnits{
    UnitTag{"s", UnitKind::kTime, 0, 1.0},          UnitTag{"ms", UnitKind::kTime, -3, 1.0},
    UnitTag{"us", UnitKind::kTime, -6, 1.0},        UnitTag{"µs", UnitKind::kTime, -6, 1.0},
    UnitTag{"ns", UnitKind::kTime, -9, 1.0},        UnitTag{"ps", UnitKind::kTime, -12, 1.0},
    UnitTag{"fs", UnitKind::kTime, -15, 1.0},
    // Hz are taken as s⁻¹ without 2π: "1GHz" is the rate in exp(-Γt).
    UnitTag{"Hz", UnitKind::kRate, 0, 1.0},         UnitTag{"kHz", UnitKind::kRate, 3, 1.0},
    UnitTag{"MHz", UnitKind::kRate, 6, 1.0},        UnitTag{"GHz", UnitKind::kRate, 9, 1.0},
    UnitTag{"THz", UnitKind::kRate, 12, 1.0},       UnitTag{"1/s", UnitKind::kRate, 0, 1.0},
    UnitTag{"/s", UnitKind::kRate, 0, 1.0},         UnitTag{"s^-1", UnitKind::kRate, 0, 1.0},
    UnitTag{"J", UnitKind::kEnergy, 0, 1.0},        UnitTag{"eV", UnitKind::kEnergy, 0, constants::electron_volt},
    UnitTag{"meV", UnitKind::kEnergy, -3, constants::electron_volt},
    UnitTag{"kg/m3", UnitKind::kDensity, 0, 1.0},   UnitTag{"kg/m^3", UnitKind::kDensity, 0, 1.0},
    UnitTag{"g/cm3", UnitKind::kDensity, 3, 1.0},   UnitTag{"g/cm^3", UnitKind::kDensity, 3, 1.0},
    UnitTag{"m/s", UnitKind::kVelocity, 0, 1.0},    UnitTag{"km/s", UnitKind::kVelocity, 3, 1.0},
    UnitTag{"m", UnitKind::kLength, 0, 1.0},        UnitTag{"mm", UnitKind::kLength, -3, 1.0},
    UnitTag{"um", UnitKind::kLength, -6, 1.0},      UnitTag{"µm", UnitKind::kLength, -6, 1.0},
    UnitTag{"nm", UnitKind::kLength, -9, 1.0},      UnitTag{"pm", UnitKind::kLength, -12, 1.0},
    UnitTag{"K", UnitKind::kTemperature, 0, 1.0},   UnitTag{"mK", UnitKind::kTemperature, -3, 1.0},
};

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
}

// Value of mantissa·10^(exponent + shift), rounded once.
double scaled_decimal(std::string_view number, int shift, const std::string& path) {
    std::string_view mantissa = number;
    int exponent = 0;
    if (const auto e = number.find_first_of("eE"); e != std::string_view::npos) {
        mantissa = number.substr(0, e);
        std::string_view exp_text = number.substr(e + 1);
        if (!exp_text.empty() && exp_text.front() == '+') exp_text.remove_prefix(1);
        const auto [p, ec] = std::from_chars(exp_text.data(), exp_text.data() + exp_text.size(), exponent);
        if (ec != std::errc{} || p != exp_text.data() + exp_text.size())
            throw ConfigError(path, "malformed number '" + std::string(number) + "'");
    }
    const std::string text = std::string(mantissa) + "e" + std::to_string(exponent + shift);
    double value = 0.0;
    const auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || p != text.data() + text.size())
        throw ConfigError(path, "malformed number '" + std::string(number) + "'");
    return value;
}

// Length of the leading decimal literal; an 'e' only counts as an exponent when digits follow.
std::size_t number_length(std::string_view s) {
    std::size_t i = 0;
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) ++i;
    while (i < s.size() && (std::isdigit(static_cast<unsigned char>(s[i])) || s[i] == '.')) ++i;
    if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
        std::size_t j = i + 1;
        if (j < s.size() && (s[j] == '+' || s[j] == '-')) ++j;
        if (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) {
            while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
            i = j;
        }
    }
    return i;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string tagged(double v, std::string_view unit) { return format_double(v) + std::string(unit); }

struct Reader {
    static std::string join(const std::string& base, std::string_view key) {
        return base.empty() ? std::string(key) : base + "." + std::string(key);
    }

    // Rejects any key not listed; keys starting with '_' are comments.
    static void check_keys(const json& obj, const std::string& path, std::initializer_list<std::string_view> allowed) {
        if (!obj.is_object()) throw ConfigError(path.empty() ? "<root>" : path, "expected an object");
        for (const auto& [key, value] : obj.items()) {
            if (!key.empty() && key.front() == '_') continue;
            if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
                throw ConfigError(join(path, key), "unknown field");
        }
    }

    // First present key among aliases.
    static const json* find(const json& obj, std::initializer_list<std::string_view> aliases) {
        for (auto a : aliases) {
            auto it = obj.find(std::string(a));
            if (it != obj.end()) return &*it;
        }
        return nullptr;
    }

    static double quantity(const json& v, UnitKind kind, const std::string& path) {
        if (v.is_string()) return parse_quantity(v.get<std::string>(), kind, path);
        if (v.is_number() && kind == UnitKind::kTemperature) return v.get<double>();
        if (v.is_number()) throw ConfigError(path, "unit tag required, e.g. \"1ps\" or \"1GHz\"");
        throw ConfigError(path, "expected a unit-tagged string");
    }

    static double number(const json& v, const std::string& path) {
        if (!v.is_number()) throw ConfigError(path, "expected a number");
        return v.get<double>();
    }

    static std::size_t count(const json& v, const std::string& path) {
        if (!v.is_number_integer() || v.get<long long>() < 0) throw ConfigError(path, "expected a non-negative integer");
        return static_cast<std::size_t>(v.get<long long>());
    }

    static bool boolean(const json& v, const std::string& path) {
        if (!v.is_boolean()) throw ConfigError(path, "expected true or false");
        return v.get<bool>();
    }

    static std::string string(const json& v, const std::string& path) {
        if (!v.is_string()) throw ConfigError(path, "expected a string");
        return v.get<std::string>();
    }

    static std::vector<double> quantity_list(const json& v, UnitKind kind, const std::string& path) {
        if (!v.is_array()) throw ConfigError(path, "expected an array");
        std::vector<double> out;
        for (std::size_t i = 0; i < v.size(); ++i)
            out.push_back(quantity(v[i], kind, path + "[" + std::to_string(i) + "]"));
        return out;
    }

};

MaterialParams material_profile(const std::string& name, const std::string& path) {
    if (name == "GaAs-default") return MaterialParams::gaas_default();
    throw ConfigError(path, "unknown material profile '" + name + "'");
}

void read_material(const json& obj, ScenarioConfig& cfg) {
    const std::string base = "material";
    Reader::check_keys(obj, base,
                       {"profile", "mass_density", "rho", "sound_velocity", "u", "deformation_electron", "D_e",
                        "deformation_hole", "D_h", "localization_length", "l"});
    if (const auto* p = Reader::find(obj, {"profile"})) {
        cfg.profile = Reader::string(*p, base + ".profile");
        if (cfg.profile == "custom") throw ConfigError(base + ".profile", "name a profile or omit the field");
        cfg.material = material_profile(cfg.profile, base + ".profile");
    }
    auto set = [&](std::initializer_list<std::string_view> keys, UnitKind kind, double& field) {
        if (const auto* v = Reader::find(obj, keys)) {
            field = Reader::quantity(*v, kind, base + "." + std::string(*keys.begin()));
        }
    };
    set({"mass_density", "rho"}, UnitKind::kDensity, cfg.material.mass_density);
    set({"sound_velocity", "u"}, UnitKind::kVelocity, cfg.material.sound_velocity);
    set({"deformation_electron", "D_e"}, UnitKind::kEnergy, cfg.material.deformation_electron);
    set({"deformation_hole", "D_h"}, UnitKind::kEnergy, cfg.material.deformation_hole);
    set({"localization_length", "l"}, UnitKind::kLength, cfg.material.localization_length);
    if (cfg.profile != "custom" && cfg.material != material_profile(cfg.profile, base + ".profile"))
        cfg.profile = "custom";
}

void read_grid(const json& obj, GridSettings& g) {
    const std::string base = "grid";
    Reader::check_keys(obj, base, {"dt", "t_start", "t_end", "n_steps", "divisor", "horizon", "min_divisor"});
    if (const auto* v = Reader::find(obj, {"dt"})) g.dt = Reader::quantity(*v, UnitKind::kTime, base + ".dt");
    if (const auto* v = Reader::find(obj, {"t_start"}))
        g.t_start = Reader::quantity(*v, UnitKind::kTime, base + ".t_start");
    if (const auto* v = Reader::find(obj, {"t_end"})) g.t_end = Reader::quantity(*v, UnitKind::kTime, base + ".t_end");
    if (const auto* v = Reader::find(obj, {"n_steps"})) g.n_steps = Reader::count(*v, base + ".n_steps");
    if (const auto* v = Reader::find(obj, {"divisor"})) g.divisor = Reader::number(*v, base + ".divisor");
    if (const auto* v = Reader::find(obj, {"horizon"})) g.horizon = Reader::number(*v, base + ".horizon");
    if (const auto* v = Reader::find(obj, {"min_divisor"})) g.min_divisor = Reader::number(*v, base + ".min_divisor");
    if (!(g.divisor > 0.0)) throw ConfigError(base + ".divisor", "must be > 0");
    if (!(g.horizon > 0.0)) throw ConfigError(base + ".horizon", "must be > 0");
    if (!(g.min_divisor > 0.0)) throw ConfigError(base + ".min_divisor", "must be > 0");
    if (g.dt && !(*g.dt > 0.0)) throw ConfigError(base + ".dt", "must be > 0");
}

void read_quadrature(const json& obj, QuadratureSpec& q) {
    const std::string base = "quadrature";
    Reader::check_keys(obj, base, {"rel_tol", "abs_tol", "max_depth", "panels_per_period", "min_panels", "max_panels"});
    if (const auto* v = Reader::find(obj, {"rel_tol"})) q.rel_tol = Reader::number(*v, base + ".rel_tol");
    if (const auto* v = Reader::find(obj, {"abs_tol"})) q.abs_tol = Reader::number(*v, base + ".abs_tol");
    if (const auto* v = Reader::find(obj, {"max_depth"}))
        q.max_depth = static_cast<int>(Reader::count(*v, base + ".max_depth"));
    if (const auto* v = Reader::find(obj, {"panels_per_period"}))
        q.panels_per_period = Reader::number(*v, base + ".panels_per_period");
    if (const auto* v = Reader::find(obj, {"min_panels"})) q.min_panels = Reader::count(*v, base + ".min_panels");
    if (const auto* v = Reader::find(obj, {"max_panels"})) q.max_panels = Reader::count(*v, base + ".max_panels");
    if (!(q.rel_tol > 0.0)) throw ConfigError(base + ".rel_tol", "must be > 0");
    if (!(q.abs_tol > 0.0)) throw ConfigError(base + ".abs_tol", "must be > 0");
    if (!(q.panels_per_period > 0.0)) throw ConfigError(base + ".panels_per_period", "must be > 0");
    if (q.min_panels < 1) throw ConfigError(base + ".min_panels", "must be >= 1");
    if (q.max_panels < q.min_panels) throw ConfigError(base + ".max_panels", "must be >= min_panels");
}

void read_kernel(const json& obj, KernelDump& k) {
    const std::string base = "kernel";
    Reader::check_keys(obj, base,
                       {"t_max", "step", "integrand_points", "cutoff_fraction", "fine_step", "fine_span", "growth",
                        "settle_tol"});
    if (const auto* v = Reader::find(obj, {"t_max"})) k.t_max = Reader::quantity(*v, UnitKind::kTime, base + ".t_max");
    if (const auto* v = Reader::find(obj, {"step"})) k.step = Reader::quantity(*v, UnitKind::kTime, base + ".step");
    if (const auto* v = Reader::find(obj, {"integrand_points"}))
        k.integrand_points = Reader::count(*v, base + ".integrand_points");
    if (const auto* v = Reader::find(obj, {"cutoff_fraction"}))
        k.cutoff_fraction = Reader::number(*v, base + ".cutoff_fraction");
    if (const auto* v = Reader::find(obj, {"fine_step"}))
        k.policy.fine_step = Reader::quantity(*v, UnitKind::kTime, base + ".fine_step");
    if (const auto* v = Reader::find(obj, {"fine_span"}))
        k.policy.fine_span = Reader::quantity(*v, UnitKind::kTime, base + ".fine_span");
    if (const auto* v = Reader::find(obj, {"growth"})) k.policy.growth = Reader::number(*v, base + ".growth");
    if (const auto* v = Reader::find(obj, {"settle_tol"}))
        k.policy.settle_tol = Reader::number(*v, base + ".settle_tol");
    if (!(k.t_max > 0.0)) throw ConfigError(base + ".t_max", "must be > 0");
    if (!(k.step > 0.0) || k.step > k.t_max) throw ConfigError(base + ".step", "must be in (0, t_max]");
    if (k.integrand_points < 2) throw ConfigError(base + ".integrand_points", "must be >= 2");
    if (!(k.cutoff_fraction > 0.0 && k.cutoff_fraction < 1.0))
        throw ConfigError(base + ".cutoff_fraction", "must be in (0, 1)");
    if (!(k.policy.fine_step > 0.0)) throw ConfigError(base + ".fine_step", "must be > 0");
    if (!(k.policy.fine_span >= k.policy.fine_step)) throw ConfigError(base + ".fine_span", "must be >= fine_step");
    if (!(k.policy.growth > 1.0)) throw ConfigError(base + ".growth", "must be > 1");
    if (!(k.policy.settle_tol > 0.0)) throw ConfigError(base + ".settle_tol", "must be > 0");
}

UnitKind axis_unit(SweepAxis axis) {
    return axis == SweepAxis::kDuration ? UnitKind::kTime : UnitKind::kTemperature;
}

std::vector<double> read_axis_values(const json& v, SweepAxis axis, const std::string& path) {
    if (v.is_array()) {
        if (axis == SweepAxis::kRateRatio) {
            std::vector<double> out;
            for (std::size_t i = 0; i < v.size(); ++i) out.push_back(Reader::number(v[i], path + "[" + std::to_string(i) + "]"));
            return out;
        }
        return Reader::quantity_list(v, axis_unit(axis), path);
    }
    // {min, max, points, spacing: "log" | "linear"}
    Reader::check_keys(v, path, {"min", "max", "points", "spacing"});
    const auto* lo = Reader::find(v, {"min"});
    const auto* hi = Reader::find(v, {"max"});
    const auto* n = Reader::find(v, {"points"});
    if (!lo) throw ConfigError(path + ".min", "missing field");
    if (!hi) throw ConfigError(path + ".max", "missing field");
    if (!n) throw ConfigError(path + ".points", "missing field");
    auto read = [&](const json& x, const std::string& p) {
        return axis == SweepAxis::kRateRatio ? Reader::number(x, p) : Reader::quantity(x, axis_unit(axis), p);
    };
    const double a = read(*lo, path + ".min");
    const double b = read(*hi, path + ".max");
    const std::size_t points = Reader::count(*n, path + ".points");
    std::string spacing = "log";
    if (const auto* s = Reader::find(v, {"spacing"})) spacing = Reader::string(*s, path + ".spacing");
    if (spacing != "log" && spacing != "linear") throw ConfigError(path + ".spacing", "expected \"log\" or \"linear\"");
    if (points < 1) throw ConfigError(path + ".points", "must be >= 1");
    if (points > 1 && !(b > a)) throw ConfigError(path + ".max", "must exceed min");
    if (spacing == "log" && !(a > 0.0)) throw ConfigError(path + ".min", "log spacing needs min > 0");
    std::vector<double> out(points);
    for (std::size_t i = 0; i < points; ++i) {
        const double f = points == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(points - 1);
        out[i] = spacing == "log" ? a * std::pow(b / a, f) : a + (b - a) * f;
    }
    out.back() = points == 1 ? a : b;
    return out;
}

void read_sweep(const json& obj, SweepSettings& s) {
    const std::string base = "sweep";
    Reader::check_keys(obj, base, {"axis", "values", "optimize", "d_min", "d_max", "rel_tol"});
    if (const auto* v = Reader::find(obj, {"axis"})) {
        const auto name = Reader::string(*v, base + ".axis");
        s.axis = parse_axis(name);
        if (!s.axis) throw ConfigError(base + ".axis", "expected duration, temperature or rate_ratio");
    }
    if (const auto* v = Reader::find(obj, {"values"})) {
        if (!s.axis) throw ConfigError(base + ".axis", "required when sweep.values is given");
        s.values = read_axis_values(*v, *s.axis, base + ".values");
        if (s.values.empty()) throw ConfigError(base + ".values", "must not be empty");
        for (std::size_t i = 1; i < s.values.size(); ++i)
            if (!(s.values[i] > s.values[i - 1]))
                throw ConfigError(base + ".values[" + std::to_string(i) + "]", "axis values must increase strictly");
    }
    if (const auto* v = Reader::find(obj, {"optimize"})) s.optimize = Reader::boolean(*v, base + ".optimize");
    if (const auto* v = Reader::find(obj, {"d_min"})) s.d_min = Reader::quantity(*v, UnitKind::kTime, base + ".d_min");
    if (const auto* v = Reader::find(obj, {"d_max"})) s.d_max = Reader::quantity(*v, UnitKind::kTime, base + ".d_max");
    if (const auto* v = Reader::find(obj, {"rel_tol"})) s.rel_tol = Reader::number(*v, base + ".rel_tol");
    if (s.d_min && !(*s.d_min > 0.0)) throw ConfigError(base + ".d_min", "must be > 0");
    if (s.d_min && s.d_max && !(*s.d_max > *s.d_min)) throw ConfigError(base + ".d_max", "must exceed d_min");
    if (!(s.rel_tol > 0.0)) throw ConfigError(base + ".rel_tol", "must be > 0");
}

ScenarioConfig from_json(const json& root) {
    Reader::check_keys(root, "",
                       {"profile", "material", "temperatures", "T", "durations", "d", "rates", "dephasing",
                        "reference", "frame", "grid", "quadrature", "kernel", "sweep", "seed", "output"});
    ScenarioConfig cfg;
    if (const auto* v = Reader::find(root, {"profile"})) {
        cfg.profile = Reader::string(*v, "profile");
        cfg.material = material_profile(cfg.profile, "profile");
    }
    if (const auto* v = Reader::find(root, {"material"})) read_material(*v, cfg);
    try {
        cfg.material.validate();
    } catch (const DomainError& e) {
        throw ConfigError("material", e.what());
    }

    const auto* temps = Reader::find(root, {"temperatures", "T"});
    if (!temps) throw ConfigError("temperatures", "missing field");
    cfg.temperatures = Reader::quantity_list(*temps, UnitKind::kTemperature, "temperatures");
    if (cfg.temperatures.empty()) throw ConfigError("temperatures", "at least one temperature is required");
    for (std::size_t i = 0; i < cfg.temperatures.size(); ++i)
        if (!(cfg.temperatures[i] >= 0.0) || !std::isfinite(cfg.temperatures[i]))
            throw ConfigError("temperatures[" + std::to_string(i) + "]", "temperature must be finite and >= 0 K");

    const auto* durs = Reader::find(root, {"durations", "d"});
    if (!durs) throw ConfigError("durations", "missing field");
    cfg.durations = Reader::quantity_list(*durs, UnitKind::kTime, "durations");
    if (cfg.durations.empty()) throw ConfigError("durations", "at least one pulse duration is required");
    for (std::size_t i = 0; i < cfg.durations.size(); ++i)
        if (!(cfg.durations[i] > 0.0) || !std::isfinite(cfg.durations[i]))
            throw ConfigError("durations[" + std::to_string(i) + "]", "duration must be finite and > 0");

    const auto* rates = Reader::find(root, {"rates"});
    if (!rates) throw ConfigError("rates", "missing field");
    Reader::check_keys(*rates, "rates", {"gamma_f1", "G1", "gamma_f2", "G2"});
    const auto* g1 = Reader::find(*rates, {"gamma_f1", "G1"});
    const auto* g2 = Reader::find(*rates, {"gamma_f2", "G2"});
    if (!g1) throw ConfigError("rates.gamma_f1", "missing field");
    if (!g2) throw ConfigError("rates.gamma_f2", "missing field");
    cfg.rates.gamma_f1 = Reader::quantity(*g1, UnitKind::kRate, "rates.gamma_f1");
    cfg.rates.gamma_f2 = Reader::quantity(*g2, UnitKind::kRate, "rates.gamma_f2");
    if (!(cfg.rates.gamma_f1 > 0.0)) throw ConfigError("rates.gamma_f1", "must be > 0");
    if (!(cfg.rates.gamma_f2 >= 0.0)) throw ConfigError("rates.gamma_f2", "must be >= 0");

    if (const auto* v = Reader::find(root, {"dephasing"})) cfg.dephasing = Reader::boolean(*v, "dephasing");
    if (const auto* v = Reader::find(root, {"reference"})) cfg.reference = Reader::boolean(*v, "reference");
    if (const auto* v = Reader::find(root, {"frame"})) {
        const auto name = Reader::string(*v, "frame");
        if (name == "polaron_shifted") cfg.frame = DriveFrame::kPolaronShifted;
        else if (name == "bare_transition") cfg.frame = DriveFrame::kBareTransition;
        else throw ConfigError("frame", "expected polaron_shifted or bare_transition");
    }
    if (const auto* v = Reader::find(root, {"grid"})) read_grid(*v, cfg.grid);
    if (const auto* v = Reader::find(root, {"quadrature"})) read_quadrature(*v, cfg.quadrature);
    if (const auto* v = Reader::find(root, {"kernel"})) read_kernel(*v, cfg.kernel);
    if (const auto* v = Reader::find(root, {"sweep"})) read_sweep(*v, cfg.sweep);
    if (const auto* v = Reader::find(root, {"seed"})) {
        if (!v->is_number_unsigned()) throw ConfigError("seed", "expected a non-negative integer");
        cfg.seed = v->get<std::uint64_t>();
    }
    if (const auto* v = Reader::find(root, {"output"})) {
        Reader::check_keys(*v, "output", {"dir"});
        if (const auto* d = Reader::find(*v, {"dir"})) cfg.output_dir = Reader::string(*d, "output.dir");
    }
    return cfg;
}

}  // namespace

double parse_quantity(std::string_view text, UnitKind kind, const std::string& path) {
    const std::string_view s = trim(text);
    const std::size_t n = number_length(s);
    if (n == 0) throw ConfigError(path, "expected a number in '" + std::string(text) + "'");
    const std::string_view number = s.substr(0, n);
    const std::string_view unit = trim(s.substr(n));
    if (unit.empty()) {
        if (kind == UnitKind::kTemperature) return scaled_decimal(number, 0, path);
        throw ConfigError(path, "unit tag required in '" + std::string(text) + "'");
    }
    for (const auto& u : kUnits) {
        if (u.tag != unit) continue;
        if (u.kind != kind) throw ConfigError(path, "unit '" + std::string(unit) + "' has the wrong dimension here");
        return scaled_decimal(number, u.pow10, path) * u.factor;
    }
    throw ConfigError(path, "unknown unit tag '" + std::string(unit) + "'");
}

std::string_view to_string(SweepAxis axis) {
    switch (axis) {
        case SweepAxis::kDuration: return "duration";
        case SweepAxis::kTemperature: return "temperature";
        case SweepAxis::kRateRatio: return "rate_ratio";
    }
    return "duration";
}

std::optional<SweepAxis> parse_axis(std::string_view name) {
    if (name == "duration") return SweepAxis::kDuration;
    if (name == "temperature") return SweepAxis::kTemperature;
    if (name == "rate_ratio") return SweepAxis::kRateRatio;
    return std::nullopt;
}

ScenarioConfig parse_config_json(std::string_view text) {
    json root;
    try {
        root = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw ConfigError("<root>", std::string("invalid JSON: ") + e.what());
    }
    return from_json(root);
}

ScenarioConfig parse_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("<file>", "cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_json(buf.str());
}

std::string serialize_config(const ScenarioConfig& cfg) {
    json j = json::object();
    if (cfg.profile != "custom") j["profile"] = cfg.profile;
    const auto& m = cfg.material;
    j["material"] = {{"mass_density", tagged(m.mass_density, "kg/m3")},
                     {"sound_velocity", tagged(m.sound_velocity, "m/s")},
                     {"deformation_electron", tagged(m.deformation_electron, "J")},
                     {"deformation_hole", tagged(m.deformation_hole, "J")},
                     {"localization_length", tagged(m.localization_length, "m")}};
    if (cfg.profile != "custom") j["material"]["profile"] = cfg.profile;
    j["temperatures"] = json::array();
    for (double t : cfg.temperatures) j["temperatures"].push_back(tagged(t, "K"));
    j["durations"] = json::array();
    for (double d : cfg.durations) j["durations"].push_back(tagged(d, "s"));
    j["rates"] = {{"gamma_f1", tagged(cfg.rates.gamma_f1, "Hz")}, {"gamma_f2", tagged(cfg.rates.gamma_f2, "Hz")}};
    j["dephasing"] = cfg.dephasing;
    j["reference"] = cfg.reference;
    j["frame"] = cfg.frame == DriveFrame::kPolaronShifted ? "polaron_shifted" : "bare_transition";

    json grid = {{"divisor", cfg.grid.divisor}, {"horizon", cfg.grid.horizon}, {"min_divisor", cfg.grid.min_divisor}};
    if (cfg.grid.dt) grid["dt"] = tagged(*cfg.grid.dt, "s");
    if (cfg.grid.t_start) grid["t_start"] = tagged(*cfg.grid.t_start, "s");
    if (cfg.grid.t_end) grid["t_end"] = tagged(*cfg.grid.t_end, "s");
    if (cfg.grid.n_steps) grid["n_steps"] = *cfg.grid.n_steps;
    j["grid"] = grid;

    const auto& q = cfg.quadrature;
    j["quadrature"] = {{"rel_tol", q.rel_tol},
                       {"abs_tol", q.abs_tol},
                       {"max_depth", q.max_depth},
                       {"panels_per_period", q.panels_per_period},
                       {"min_panels", q.min_panels},
                       {"max_panels", q.max_panels}};
    const auto& k = cfg.kernel;
    j["kernel"] = {{"t_max", tagged(k.t_max, "s")},
                   {"step", tagged(k.step, "s")},
                   {"integrand_points", k.integrand_points},
                   {"cutoff_fraction", k.cutoff_fraction},
                   {"fine_step", tagged(k.policy.fine_step, "s")},
                   {"fine_span", tagged(k.policy.fine_span, "s")},
                   {"growth", k.policy.growth},
                   {"settle_tol", k.policy.settle_tol}};

    json sweep = {{"optimize", cfg.sweep.optimize}, {"rel_tol", cfg.sweep.rel_tol}};
    if (cfg.sweep.axis) {
        sweep["axis"] = std::string(to_string(*cfg.sweep.axis));
        if (!cfg.sweep.values.empty()) {
            json values = json::array();
            for (double v : cfg.sweep.values) {
                switch (*cfg.sweep.axis) {
                    case SweepAxis::kDuration: values.push_back(tagged(v, "s")); break;
                    case SweepAxis::kTemperature: values.push_back(tagged(v, "K")); break;
                    case SweepAxis::kRateRatio: values.push_back(v); break;
                }
            }
            sweep["values"] = values;
        }
    }
    if (cfg.sweep.d_min) sweep["d_min"] = tagged(*cfg.sweep.d_min, "s");
    if (cfg.sweep.d_max) sweep["d_max"] = tagged(*cfg.sweep.d_max, "s");
    j["sweep"] = sweep;
    j["seed"] = cfg.seed;
    if (cfg.output_dir) j["output"] = {{"dir", cfg.output_dir->generic_string()}};
    return j.dump(2) + "\n";
}

std::string provenance_hash(const ScenarioConfig& cfg) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : serialize_config(cfg)) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

SimGrid resolve_grid(const GridSettings& s, const PulseSpec& pulse, const CouplingRates& rates) {
    const double start = s.t_start.value_or(pulse.start_time);
    const double slow = std::max(pulse.duration, 1.0 / rates.total());
    const double fast = std::min(pulse.duration, 1.0 / rates.total());
    double end = s.t_end.value_or(pulse.arrival_time + s.horizon * slow);
    if (!(end > start)) throw ConfigError(s.t_end ? "grid.t_end" : "grid", "zero-length time grid");
    std::size_t n = 0;
    if (s.n_steps) {
        n = *s.n_steps;
        if (n == 0) throw ConfigError("grid.n_steps", "zero-length time grid");
    } else {
        const double dt = s.dt.value_or(fast / s.divisor);
        n = static_cast<std::size_t>(std::ceil((end - start) / dt - 1e-9));
        if (n == 0) throw ConfigError("grid", "zero-length time grid");
        end = start + dt * static_cast<double>(n);
    }
    SimGrid grid{start, end, n};
    grid.validate(pulse, rates, s.min_divisor);
    return grid;
}

}  // namespace simqd
