#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <set>

#include <json.hpp>

#include "superrad/errors.hpp"
#include "superrad/harness.hpp"
#include "superrad/serialization.hpp"

namespace superrad {

namespace {

using json = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& path, const std::string& what) { throw ValidationError(path + ": " + what); }

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

void check_keys(const json& j, const std::string& path, std::initializer_list<const char*> allowed) {
    if (!j.is_object()) fail(path.empty() ? "config" : path, "expected an object");
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& item : j.items()) {
        if (!ok.count(item.key())) fail(join(path, item.key()), "unknown key");
    }
}

double as_double(const json& j, const std::string& path) {
    if (!j.is_number()) fail(path, "expected a number");
    return j.get<double>();
}

std::size_t as_count(const json& j, const std::string& path) {
    if (!j.is_number_integer() || j.get<long long>() < 0) fail(path, "expected a non-negative integer");
    return j.get<std::size_t>();
}

bool as_bool(const json& j, const std::string& path) {
    if (!j.is_boolean()) fail(path, "expected true or false");
    return j.get<bool>();
}

std::string as_string(const json& j, const std::string& path) {
    if (!j.is_string()) fail(path, "expected a string");
    return j.get<std::string>();
}

Vec3 as_vec3(const json& j, const std::string& path) {
    if (!j.is_array() || j.size() != 3) fail(path, "expected [x, y, z]");
    return Vec3(as_double(j[0], path + "[0]"), as_double(j[1], path + "[1]"), as_double(j[2], path + "[2]"));
}

std::pair<double, double> as_range(const json& j, const std::string& path) {
    if (!j.is_array() || j.size() != 2) fail(path, "expected [min, max]");
    return {as_double(j[0], path + "[0]"), as_double(j[1], path + "[1]")};
}

std::vector<double> double_axis(const json& j, const std::string& path) {
    if (j.is_array()) {
        std::vector<double> v;
        for (std::size_t i = 0; i < j.size(); ++i) v.push_back(as_double(j[i], path + "[" + std::to_string(i) + "]"));
        return v;
    }
    check_keys(j, path, {"linspace", "logspace"});
    if (j.size() != 1) fail(path, "expected exactly one of linspace, logspace");
    const bool log = j.contains("logspace");
    const auto& spec = log ? j["logspace"] : j["linspace"];
    const std::string sub = join(path, log ? "logspace" : "linspace");
    if (!spec.is_array() || spec.size() != 3) fail(sub, "expected [first, last, count]");
    const double lo = as_double(spec[0], sub + "[0]");
    const double hi = as_double(spec[1], sub + "[1]");
    const std::size_t count = as_count(spec[2], sub + "[2]");
    if (count == 0) return {};
    if (log && !(lo > 0 && hi > 0)) fail(sub, "logspace endpoints must be positive");
    if (count == 1) return {lo};
    std::vector<double> v(count);
    for (std::size_t i = 0; i < count; ++i) {
        const double s = static_cast<double>(i) / static_cast<double>(count - 1);
        v[i] = log ? lo * std::pow(hi / lo, s) : lo + (hi - lo) * s;
    }
    v.front() = lo;
    v.back() = hi;
    return v;
}

std::vector<std::size_t> count_axis(const json& j, const std::string& path) {
    if (j.is_array()) {
        std::vector<std::size_t> v;
        for (std::size_t i = 0; i < j.size(); ++i) v.push_back(as_count(j[i], path + "[" + std::to_string(i) + "]"));
        return v;
    }
    check_keys(j, path, {"range"});
    const auto& spec = j.at("range");
    const std::string sub = join(path, "range");
    if (!spec.is_array() || spec.size() < 2 || spec.size() > 3) fail(sub, "expected [first, last] or [first, last, step]");
    const std::size_t lo = as_count(spec[0], sub + "[0]");
    const std::size_t hi = as_count(spec[1], sub + "[1]");
    const std::size_t step = spec.size() == 3 ? as_count(spec[2], sub + "[2]") : 1;
    if (step == 0) fail(sub, "step must be positive");
    std::vector<std::size_t> v;
    for (std::size_t x = lo; x <= hi; x += step) v.push_back(x);
    return v;
}

Axis parse_axis(const std::string& s, const std::string& path) {
    if (s == "x") return Axis::X;
    if (s == "y") return Axis::Y;
    if (s == "z") return Axis::Z;
    fail(path, "expected x, y or z");
}

const char* axis_name(Axis a) {
    switch (a) {
    case Axis::X: return "x";
    case Axis::Y: return "y";
    default: return "z";
    }
}

template <class T>
void check_axis(const SweepAxis<T>& axis, const std::string& path) {
    if (!axis) return;
    if (axis->empty()) fail(path, "sweep axis is empty");
    for (std::size_t i = 1; i < axis->size(); ++i) {
        if (!((*axis)[i - 1] < (*axis)[i])) fail(path, "sweep values must be strictly ascending");
    }
}

template <class T>
T axis_max(const SweepAxis<T>& axis, T fallback) {
    return axis ? axis->back() : fallback;
}

template <class T>
T axis_min(const SweepAxis<T>& axis, T fallback) {
    return axis ? axis->front() : fallback;
}

bool finite_positive(double x) { return std::isfinite(x) && x > 0; }

} // namespace

std::string to_string(Engine e) {
    switch (e) {
    case Engine::Exact: return "exact";
    case Engine::Cumulant: return "cumulant";
    default: return "both";
    }
}

std::string to_string(RowStatus s) {
    switch (s) {
    case RowStatus::Ok: return "ok";
    case RowStatus::Partial: return "partial";
    default: return "failed";
    }
}

ExperimentConfig parse_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ValidationError(std::string("config: not valid JSON: ") + e.what());
    }
    check_keys(j, "", {"schema_version", "name", "geometry", "pump", "engine", "sweep", "observables", "direction",
                       "spectrum", "map", "disorder", "output_dir", "tolerances"});
    if (!j.contains("schema_version")) fail("schema_version", "required key missing");
    ExperimentConfig cfg;
    cfg.source = text;
    cfg.schema_version = static_cast<int>(as_count(j["schema_version"], "schema_version"));
    if (cfg.schema_version != kConfigSchemaVersion) {
        fail("schema_version", "unsupported version " + std::to_string(cfg.schema_version));
    }
    for (const char* key : {"geometry", "pump", "engine"}) {
        if (!j.contains(key)) fail(key, "required key missing");
    }
    cfg.name = j.contains("name") ? as_string(j["name"], "name") : "experiment";

    const auto& g = j["geometry"];
    check_keys(g, "geometry", {"n", "spacing", "dipole", "gamma0", "positions"});
    if (g.contains("positions")) {
        const auto& pos = g["positions"];
        if (!pos.is_array()) fail("geometry.positions", "expected a list of [x, y, z]");
        std::vector<Vec3> v;
        for (std::size_t i = 0; i < pos.size(); ++i) v.push_back(as_vec3(pos[i], "geometry.positions[" + std::to_string(i) + "]"));
        cfg.n = v.size();
        cfg.positions = std::move(v);
        if (g.contains("n") && as_count(g["n"], "geometry.n") != cfg.n) fail("geometry.n", "disagrees with positions");
    } else {
        if (!g.contains("n")) fail("geometry.n", "required without explicit positions");
        cfg.n = as_count(g["n"], "geometry.n");
    }
    if (g.contains("spacing")) cfg.spacing = as_double(g["spacing"], "geometry.spacing");
    if (g.contains("dipole")) cfg.dipole = as_vec3(g["dipole"], "geometry.dipole");
    if (g.contains("gamma0")) cfg.gamma0 = as_double(g["gamma0"], "geometry.gamma0");

    const auto& p = j["pump"];
    check_keys(p, "pump", {"n_pumped", "rate", "placement", "rates"});
    if (p.contains("rates")) {
        const auto& r = p["rates"];
        if (!r.is_array()) fail("pump.rates", "expected a list of rates");
        std::vector<double> v;
        for (std::size_t i = 0; i < r.size(); ++i) v.push_back(as_double(r[i], "pump.rates[" + std::to_string(i) + "]"));
        cfg.rates = std::move(v);
        for (const char* key : {"n_pumped", "rate", "placement"}) {
            if (p.contains(key)) fail(std::string("pump.") + key, "not allowed together with pump.rates");
        }
    } else {
        cfg.n_pumped = p.contains("n_pumped") ? as_count(p["n_pumped"], "pump.n_pumped") : cfg.n;
        if (p.contains("rate")) cfg.rate = as_double(p["rate"], "pump.rate");
        if (p.contains("placement")) {
            const auto place = as_string(p["placement"], "pump.placement");
            if (place != "first" && place != "last") fail("pump.placement", "expected first or last");
            cfg.pump_last = place == "last";
        }
    }

    const auto engine = as_string(j["engine"], "engine");
    if (engine == "exact") {
        cfg.engine = Engine::Exact;
    } else if (engine == "cumulant") {
        cfg.engine = Engine::Cumulant;
    } else if (engine == "both") {
        cfg.engine = Engine::Both;
    } else {
        fail("engine", "expected exact, cumulant or both");
    }

    if (j.contains("sweep")) {
        const auto& s = j["sweep"];
        check_keys(s, "sweep", {"n", "n_pumped", "spacing", "rate"});
        if (s.contains("n")) cfg.n_grid = count_axis(s["n"], "sweep.n");
        if (s.contains("n_pumped")) cfg.n_pumped_grid = count_axis(s["n_pumped"], "sweep.n_pumped");
        if (s.contains("spacing")) cfg.spacing_grid = double_axis(s["spacing"], "sweep.spacing");
        if (s.contains("rate")) cfg.rate_grid = double_axis(s["rate"], "sweep.rate");
    }

    if (j.contains("observables")) {
        const auto& o = j["observables"];
        if (!o.is_array()) fail("observables", "expected a list of names");
        for (std::size_t i = 0; i < o.size(); ++i) {
            const auto path = "observables[" + std::to_string(i) + "]";
            const auto name = as_string(o[i], path);
            if (name == "emission") {
                cfg.observables.emission = true;
            } else if (name == "direction") {
                cfg.observables.direction = true;
            } else if (name == "spectrum") {
                cfg.observables.spectrum = true;
            } else if (name == "linewidth") {
                cfg.observables.linewidth = true;
            } else if (name == "g2") {
                cfg.observables.g2 = true;
            } else if (name == "map") {
                cfg.observables.map = true;
            } else {
                fail(path, "unknown observable " + name);
            }
        }
    }

    if (j.contains("direction")) {
        const auto& d = j["direction"];
        check_keys(d, "direction", {"mode", "phi", "theta", "phi_points", "theta_points", "detector_radius", "far_field"});
        const auto mode = d.contains("mode") ? as_string(d["mode"], "direction.mode") : "max";
        if (mode != "max" && mode != "fixed") fail("direction.mode", "expected max or fixed");
        cfg.direction.maximal = mode == "max";
        if (!cfg.direction.maximal) {
            if (!d.contains("phi") || !d.contains("theta")) fail("direction", "fixed mode needs phi and theta");
            cfg.direction.fixed = {as_double(d["phi"], "direction.phi"), as_double(d["theta"], "direction.theta")};
        } else if (d.contains("phi") || d.contains("theta")) {
            fail("direction", "phi and theta are only used in fixed mode");
        }
        if (d.contains("phi_points")) cfg.direction.grid.phi_points = as_count(d["phi_points"], "direction.phi_points");
        if (d.contains("theta_points")) {
            cfg.direction.grid.theta_points = as_count(d["theta_points"], "direction.theta_points");
        }
        if (d.contains("detector_radius")) {
            cfg.direction.detector_radius = as_double(d["detector_radius"], "direction.detector_radius");
        }
        if (d.contains("far_field") && as_bool(d["far_field"], "direction.far_field")) {
            if (d.contains("detector_radius")) fail("direction.far_field", "conflicts with detector_radius");
            cfg.direction.detector_radius = std::numeric_limits<double>::infinity();
        }
    }

    if (j.contains("spectrum")) {
        const auto& s = j["spectrum"];
        check_keys(s, "spectrum", {"half_width", "coarse_points", "points_per_fwhm", "max_refinements"});
        if (s.contains("half_width")) cfg.spectrum.half_width = as_double(s["half_width"], "spectrum.half_width");
        if (s.contains("coarse_points")) cfg.spectrum.coarse_points = as_count(s["coarse_points"], "spectrum.coarse_points");
        if (s.contains("points_per_fwhm")) {
            cfg.spectrum.points_per_fwhm = as_count(s["points_per_fwhm"], "spectrum.points_per_fwhm");
        }
        if (s.contains("max_refinements")) {
            cfg.spectrum.max_refinements = as_count(s["max_refinements"], "spectrum.max_refinements");
        }
    }

    if (j.contains("map")) {
        const auto& m = j["map"];
        check_keys(m, "map", {"normal", "offset", "u_range", "v_range", "points", "centered", "annulus"});
        auto& plane = cfg.map.plane;
        if (m.contains("normal")) plane.normal = parse_axis(as_string(m["normal"], "map.normal"), "map.normal");
        if (m.contains("offset")) plane.offset = as_double(m["offset"], "map.offset");
        if (m.contains("u_range")) std::tie(plane.u_min, plane.u_max) = as_range(m["u_range"], "map.u_range");
        if (m.contains("v_range")) std::tie(plane.v_min, plane.v_max) = as_range(m["v_range"], "map.v_range");
        if (m.contains("points")) {
            const auto& pts = m["points"];
            if (!pts.is_array() || pts.size() != 2) fail("map.points", "expected [u_points, v_points]");
            plane.u_points = as_count(pts[0], "map.points[0]");
            plane.v_points = as_count(pts[1], "map.points[1]");
        }
        if (m.contains("centered")) cfg.map.centered = as_bool(m["centered"], "map.centered");
        if (m.contains("annulus")) std::tie(cfg.map.annulus_inner, cfg.map.annulus_outer) = as_range(m["annulus"], "map.annulus");
    }

    if (j.contains("disorder")) {
        const auto& d = j["disorder"];
        check_keys(d, "disorder", {"epsilon", "realizations", "seed"});
        for (const char* key : {"epsilon", "realizations", "seed"}) {
            if (!d.contains(key)) fail(std::string("disorder.") + key, "required key missing");
        }
        DisorderConfig dc;
        dc.epsilon = as_double(d["epsilon"], "disorder.epsilon");
        dc.realizations = as_count(d["realizations"], "disorder.realizations");
        dc.seed = as_count(d["seed"], "disorder.seed");
        cfg.disorder = dc;
    }

    if (j.contains("output_dir")) cfg.output_dir = as_string(j["output_dir"], "output_dir");

    if (j.contains("tolerances")) {
        const auto& t = j["tolerances"];
        check_keys(t, "tolerances", {"cross_check", "exact_cap", "balance_exact", "balance_cumulant", "steady_residual",
                                     "cumulant_rhs"});
        auto& tol = cfg.tolerances;
        if (t.contains("cross_check")) tol.cross_check = as_double(t["cross_check"], "tolerances.cross_check");
        if (t.contains("exact_cap")) tol.exact_cap = as_count(t["exact_cap"], "tolerances.exact_cap");
        if (t.contains("balance_exact")) tol.balance_exact = as_double(t["balance_exact"], "tolerances.balance_exact");
        if (t.contains("balance_cumulant")) {
            tol.balance_cumulant = as_double(t["balance_cumulant"], "tolerances.balance_cumulant");
        }
        if (t.contains("steady_residual")) {
            tol.steady_residual = as_double(t["steady_residual"], "tolerances.steady_residual");
        }
        if (t.contains("cumulant_rhs")) tol.cumulant_rhs = as_double(t["cumulant_rhs"], "tolerances.cumulant_rhs");
    }

    validate(cfg);
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::string text;
    try {
        text = read_text_file(path);
    } catch (const InvalidInput& e) {
        throw ValidationError(e.what());
    }
    return parse_config(text);
}

void validate(const ExperimentConfig& cfg) {
    if (cfg.schema_version != kConfigSchemaVersion) fail("schema_version", "unsupported version");
    if (cfg.output_dir.empty()) fail("output_dir", "must not be empty");

    check_axis(cfg.n_grid, "sweep.n");
    check_axis(cfg.n_pumped_grid, "sweep.n_pumped");
    check_axis(cfg.spacing_grid, "sweep.spacing");
    check_axis(cfg.rate_grid, "sweep.rate");

    if (cfg.positions) {
        if (cfg.positions->empty()) fail("geometry.positions", "needs at least one emitter");
        if (cfg.positions->size() != cfg.n) fail("geometry.n", "disagrees with positions");
        if (cfg.n_grid) fail("sweep.n", "cannot sweep N with explicit positions");
        if (cfg.spacing_grid) fail("sweep.spacing", "cannot sweep the spacing with explicit positions");
        if (cfg.disorder) fail("disorder", "needs a regular chain geometry");
    }
    const std::size_t n_min = axis_min(cfg.n_grid, cfg.n);
    const std::size_t n_max = axis_max(cfg.n_grid, cfg.n);
    if (n_min < 1) fail(cfg.n_grid ? "sweep.n" : "geometry.n", "needs at least one emitter");
    if (!finite_positive(axis_min(cfg.spacing_grid, cfg.spacing))) {
        fail(cfg.spacing_grid ? "sweep.spacing" : "geometry.spacing", "must be positive");
    }
    if (!std::isfinite(axis_max(cfg.spacing_grid, cfg.spacing))) fail("sweep.spacing", "must be finite");
    if (!(cfg.dipole.norm() > 0) || !cfg.dipole.allFinite()) fail("geometry.dipole", "must be a non-zero vector");
    if (!finite_positive(cfg.gamma0)) fail("geometry.gamma0", "must be positive");

    if (cfg.rates) {
        if (cfg.rates->size() != cfg.n) fail("pump.rates", "needs one rate per emitter");
        for (double r : *cfg.rates) {
            if (!(r >= 0) || !std::isfinite(r)) fail("pump.rates", "rates must be finite and non-negative");
        }
        if (cfg.n_grid) fail("sweep.n", "cannot sweep N with explicit pump rates");
        if (cfg.n_pumped_grid) fail("sweep.n_pumped", "not allowed with explicit pump rates");
        if (cfg.rate_grid) fail("sweep.rate", "not allowed with explicit pump rates");
    } else {
        const double r_min = axis_min(cfg.rate_grid, cfg.rate);
        const double r_max = axis_max(cfg.rate_grid, cfg.rate);
        if (!(r_min >= 0) || !std::isfinite(r_max)) fail(cfg.rate_grid ? "sweep.rate" : "pump.rate", "must be finite and non-negative");
        if (axis_max(cfg.n_pumped_grid, cfg.n_pumped) > n_min) {
            fail(cfg.n_pumped_grid ? "sweep.n_pumped" : "pump.n_pumped", "exceeds the number of emitters");
        }
    }

    if (cfg.engine != Engine::Cumulant && n_max > cfg.tolerances.exact_cap) {
        fail("engine", "exact engine limited to N <= " + std::to_string(cfg.tolerances.exact_cap) + ", grid reaches N = " +
                           std::to_string(n_max));
    }
    if (cfg.observables.g2 && cfg.engine == Engine::Cumulant) fail("observables", "g2 requires the exact engine");

    if (cfg.direction.grid.phi_points < 1 || cfg.direction.grid.theta_points < 1) {
        fail("direction", "angular grid needs at least one point per axis");
    }
    if (!(cfg.direction.detector_radius > 0)) fail("direction.detector_radius", "must be positive");
    if (!cfg.direction.maximal && (!std::isfinite(cfg.direction.fixed.phi) || !std::isfinite(cfg.direction.fixed.theta))) {
        fail("direction", "phi and theta must be finite");
    }

    if (!(cfg.spectrum.half_width >= 0) || !std::isfinite(cfg.spectrum.half_width)) {
        fail("spectrum.half_width", "must be finite and non-negative");
    }
    if (cfg.spectrum.coarse_points < 3) fail("spectrum.coarse_points", "needs at least 3 points");
    if (cfg.spectrum.points_per_fwhm < 1) fail("spectrum.points_per_fwhm", "must be positive");

    try {
        cfg.map.plane.validate();
    } catch (const InvalidInput& e) {
        fail("map", e.what());
    }
    if (!(cfg.map.annulus_inner >= 0 && cfg.map.annulus_inner < cfg.map.annulus_outer)) {
        fail("map.annulus", "expected 0 <= inner < outer");
    }

    if (cfg.disorder) {
        const auto& d = *cfg.disorder;
        if (!(d.epsilon >= 0) || !std::isfinite(d.epsilon)) fail("disorder.epsilon", "must be finite and non-negative");
        if (d.realizations < 2) fail("disorder.realizations", "needs at least 2 realizations");
    }

    const auto& t = cfg.tolerances;
    for (const auto& [name, v] : {std::pair{"cross_check", t.cross_check}, std::pair{"balance_exact", t.balance_exact},
                                  std::pair{"balance_cumulant", t.balance_cumulant},
                                  std::pair{"steady_residual", t.steady_residual}, std::pair{"cumulant_rhs", t.cumulant_rhs}}) {
        if (!finite_positive(v)) fail(std::string("tolerances.") + name, "must be positive");
    }
    if (t.exact_cap < 1) fail("tolerances.exact_cap", "must be positive");
}

std::vector<GridPoint> expand_grid(const ExperimentConfig& cfg) {
    const std::vector<std::size_t> ns = cfg.n_grid.value_or(std::vector<std::size_t>{cfg.n});
    const std::vector<std::size_t> nps = cfg.n_pumped_grid.value_or(std::vector<std::size_t>{cfg.n_pumped});
    const std::vector<double> as = cfg.spacing_grid.value_or(std::vector<double>{cfg.spacing});
    const std::vector<double> rs = cfg.rate_grid.value_or(std::vector<double>{cfg.rate});
    std::vector<GridPoint> out;
    for (std::size_t n : ns) {
        for (std::size_t np : nps) {
            for (double a : as) {
                for (double r : rs) {
                    GridPoint g{out.size(), n, np, a, r};
                    if (cfg.rates) {
                        g.n_pumped = static_cast<std::size_t>(
                            std::count_if(cfg.rates->begin(), cfg.rates->end(), [](double x) { return x > 0; }));
                        g.rate = *std::max_element(cfg.rates->begin(), cfg.rates->end());
                    }
                    out.push_back(g);
                }
            }
        }
    }
    return out;
}

std::string config_to_json(const ExperimentConfig& cfg) {
    json j;
    j["schema_version"] = cfg.schema_version;
    j["name"] = cfg.name;
    json g;
    g["n"] = cfg.n;
    g["spacing"] = cfg.spacing;
    g["dipole"] = {cfg.dipole.x(), cfg.dipole.y(), cfg.dipole.z()};
    g["gamma0"] = cfg.gamma0;
    if (cfg.positions) {
        json pos = json::array();
        for (const auto& r : *cfg.positions) pos.push_back({r.x(), r.y(), r.z()});
        g["positions"] = std::move(pos);
    }
    j["geometry"] = std::move(g);
    if (cfg.rates) {
        j["pump"] = {{"rates", *cfg.rates}};
    } else {
        j["pump"] = {{"n_pumped", cfg.n_pumped}, {"rate", cfg.rate}, {"placement", cfg.pump_last ? "last" : "first"}};
    }
    j["engine"] = to_string(cfg.engine);
    json s = json::object();
    if (cfg.n_grid) s["n"] = *cfg.n_grid;
    if (cfg.n_pumped_grid) s["n_pumped"] = *cfg.n_pumped_grid;
    if (cfg.spacing_grid) s["spacing"] = *cfg.spacing_grid;
    if (cfg.rate_grid) s["rate"] = *cfg.rate_grid;
    if (!s.empty()) j["sweep"] = std::move(s);
    json obs = json::array();
    const auto& o = cfg.observables;
    if (o.emission) obs.push_back("emission");
    if (o.direction) obs.push_back("direction");
    if (o.spectrum) obs.push_back("spectrum");
    if (o.linewidth) obs.push_back("linewidth");
    if (o.g2) obs.push_back("g2");
    if (o.map) obs.push_back("map");
    j["observables"] = std::move(obs);
    json d;
    d["mode"] = cfg.direction.maximal ? "max" : "fixed";
    if (!cfg.direction.maximal) {
        d["phi"] = cfg.direction.fixed.phi;
        d["theta"] = cfg.direction.fixed.theta;
    }
    d["phi_points"] = cfg.direction.grid.phi_points;
    d["theta_points"] = cfg.direction.grid.theta_points;
    if (std::isinf(cfg.direction.detector_radius)) {
        d["far_field"] = true;
    } else {
        d["detector_radius"] = cfg.direction.detector_radius;
    }
    j["direction"] = std::move(d);
    j["spectrum"] = {{"half_width", cfg.spectrum.half_width},
                     {"coarse_points", cfg.spectrum.coarse_points},
                     {"points_per_fwhm", cfg.spectrum.points_per_fwhm},
                     {"max_refinements", cfg.spectrum.max_refinements}};
    const auto& pl = cfg.map.plane;
    j["map"] = {{"normal", axis_name(pl.normal)},
                {"offset", pl.offset},
                {"u_range", {pl.u_min, pl.u_max}},
                {"v_range", {pl.v_min, pl.v_max}},
                {"points", {pl.u_points, pl.v_points}},
                {"centered", cfg.map.centered},
                {"annulus", {cfg.map.annulus_inner, cfg.map.annulus_outer}}};
    if (cfg.disorder) {
        j["disorder"] = {{"epsilon", cfg.disorder->epsilon},
                         {"realizations", cfg.disorder->realizations},
                         {"seed", cfg.disorder->seed}};
    }
    j["output_dir"] = cfg.output_dir;
    const auto& t = cfg.tolerances;
    j["tolerances"] = {{"cross_check", t.cross_check},         {"exact_cap", t.exact_cap},
                       {"balance_exact", t.balance_exact},     {"balance_cumulant", t.balance_cumulant},
                       {"steady_residual", t.steady_residual}, {"cumulant_rhs", t.cumulant_rhs}};
    return j.dump(2) + "\n";
}

} // namespace superrad
