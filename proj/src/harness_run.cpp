#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>

#include <json.hpp>

#include "csv_format.hpp"
#include "superrad/coupling.hpp"
#include "superrad/cumulant.hpp"
#include "superrad/errors.hpp"
#include "superrad/harness.hpp"
#include "superrad/parallel.hpp"
#include "superrad/serialization.hpp"

#ifndef SUPERRAD_VERSION
#define SUPERRAD_VERSION "0.0.0"
#endif

namespace superrad {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using detail::format_double;
using Clock = std::chrono::steady_clock;

constexpr const char* kResultColumns[] = {
    "point", "n", "n_pumped", "spacing", "rate", "engine", "status",
    "emission", "independent_emission", "emission_ratio", "total_population", "balance_residual", "converged",
    "phi", "theta", "fwhm", "peak_position", "peak_count", "g2", "g2_photodetection", "anisotropy",
    "emission_stderr", "fwhm_stderr", "peak_position_stderr", "realizations", "failed_realizations", "degraded",
    "cross_check_rel_diff", "cross_check_flag", "weak_pump", "error"};

constexpr const char* kRealizationColumns[] = {"point", "realization", "engine", "status", "resamples", "converged",
                                               "emission", "fwhm", "peak_position", "peak_count", "error"};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string cell(const std::optional<double>& v) { return v ? format_double(*v) : ""; }
std::string cell(const std::optional<std::size_t>& v) { return v ? std::to_string(*v) : ""; }
std::string cell(bool b) { return b ? "1" : "0"; }

std::string quoted(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c == '\n' ? ' ' : c;
    }
    return out + "\"";
}

template <std::size_t N>
std::string header_line(const char* const (&cols)[N]) {
    std::string out;
    for (std::size_t i = 0; i < N; ++i) out += (i ? "," : "") + std::string(cols[i]);
    return out + "\n";
}

std::string join_row(const std::vector<std::string>& cells) {
    std::string out;
    for (std::size_t i = 0; i < cells.size(); ++i) out += (i ? "," : "") + cells[i];
    return out + "\n";
}

std::string point_tag(std::size_t index, Engine e) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "point_%04zu_", index);
    return buf + to_string(e);
}

class RunLog {
public:
    explicit RunLog(const fs::path* path) {
        if (path) out_.open(*path, std::ios::binary);
    }
    void line(const std::string& s) {
        std::lock_guard lock(mutex_);
        if (out_) out_ << s << '\n' << std::flush;
    }

private:
    std::mutex mutex_;
    std::ofstream out_;
};

struct Physics {
    EmitterArray array;
    PumpPattern pump;
    CouplingMatrices c;
    std::size_t resamples = 0;
};

Physics build_physics(const ExperimentConfig& cfg, const GridPoint& g, std::optional<std::size_t> realization) {
    EmitterArray array = cfg.positions ? EmitterArray(*cfg.positions, cfg.dipole, cfg.gamma0)
                                       : build_chain(g.n, g.spacing, cfg.dipole, cfg.gamma0);
    std::size_t resamples = 0;
    if (realization) {
        auto d = apply_disorder(array, *cfg.disorder, g.spacing, *realization);
        array = d.array;
        resamples = d.resamples;
    }
    PumpPattern pump = cfg.rates ? PumpPattern(*cfg.rates)
                       : cfg.pump_last ? pump_pattern_last(g.n, g.n_pumped, g.rate)
                                       : pump_pattern_first(g.n, g.n_pumped, g.rate);
    auto c = coupling_matrices(array);
    return {std::move(array), std::move(pump), std::move(c), resamples};
}

/// Stationary moments from either engine, plus what the observables need.
struct Stationary {
    Eigen::MatrixXcd pm;
    Eigen::VectorXd ee;
    bool converged = false;
    std::vector<std::string> warnings;
    std::optional<Liouvillian> L;
    std::optional<DensityMatrix> rho;
    std::optional<CumulantState> moments;
};

Stationary solve(const ExperimentConfig& cfg, const Physics& ph, Engine e) {
    Stationary s;
    if (e == Engine::Exact) {
        s.L.emplace(ph.c, ph.pump, cfg.tolerances.exact_cap);
        SteadyStateOptions so;
        so.residual_limit = cfg.tolerances.steady_residual;
        s.rho = steady_state(*s.L, so);
        const auto pc = pair_correlations(*s.rho);
        s.pm = pc.coherences;
        s.ee = pc.populations;
        s.converged = true;
    } else {
        CumulantSteadyOptions co;
        co.tolerance = cfg.tolerances.cumulant_rhs;
        auto res = cumulant_steady_state(ph.c, ph.pump, co);
        s.pm = res.state.pm;
        s.ee = res.state.ee;
        s.converged = res.converged;
        s.warnings = res.warnings;
        if (!res.converged) s.warnings.push_back("cumulant steady state not converged, max|rhs| = " + format_double(res.rhs_norm));
        s.moments = std::move(res.state);
    }
    return s;
}

double independent_total(const PumpPattern& p, double gamma0) {
    double sum = 0.0;
    for (double r : p.rates()) sum += independent_emission(1, r, gamma0);
    return sum;
}

PlaneSpec placed_plane(const MapSettings& m, const Vec3& centroid) {
    PlaneSpec p = m.plane;
    if (!m.centered) return p;
    const int normal = static_cast<int>(p.normal);
    const int u_axis = normal == 0 ? 1 : 0;
    const int v_axis = normal == 2 ? 1 : 2;
    p.offset += centroid(normal);
    p.u_min += centroid(u_axis);
    p.u_max += centroid(u_axis);
    p.v_min += centroid(v_axis);
    p.v_max += centroid(v_axis);
    return p;
}

std::pair<double, double> in_plane(const PlaneSpec& p, const Vec3& r) {
    const int normal = static_cast<int>(p.normal);
    return {r(normal == 0 ? 1 : 0), r(normal == 2 ? 1 : 2)};
}

/// Artifact location for per-row files; empty when nothing is written.
struct ArtifactDir {
    std::optional<fs::path> root;

    void write(const std::string& sub, const std::string& file, const std::string& text) const {
        if (!root) return;
        const fs::path dir = *root / sub;
        fs::create_directories(dir);
        write_text_file(dir / file, text);
    }
};

/// Computes one row; observable failures downgrade the row to partial.
RowResult evaluate(const ExperimentConfig& cfg, const GridPoint& g, Engine e, std::optional<std::size_t> realization,
                   const ArtifactDir& artifacts, std::size_t* resamples) {
    RowResult row;
    row.point = g;
    row.engine = e;
    const auto t0 = Clock::now();
    std::vector<std::string> errors;
    try {
        const Physics ph = build_physics(cfg, g, realization);
        if (resamples) *resamples = ph.resamples;
        row.weak_pump = ph.pump.max_rate() <= ph.array.gamma0();
        Stationary st = solve(cfg, ph, e);
        row.converged = st.converged;
        row.warnings = st.warnings;
        row.emission = total_emission(ph.c, st.pm);
        row.independent = independent_total(ph.pump, ph.array.gamma0());
        row.total_population = st.ee.sum();
        double input = 0.0;
        for (std::size_t k = 0; k < ph.pump.size(); ++k) input += ph.pump.rate(k) * (1.0 - st.ee(static_cast<Eigen::Index>(k)));
        row.balance_residual = input > 0 ? std::abs(*row.emission - input) / input : std::abs(*row.emission);
        const double balance_tol = e == Engine::Exact ? cfg.tolerances.balance_exact : cfg.tolerances.balance_cumulant;
        if (*row.balance_residual > balance_tol) {
            row.warnings.push_back("photon balance residual " + format_double(*row.balance_residual) + " exceeds " +
                                   format_double(balance_tol));
        }

        const auto& obs = cfg.observables;
        const std::string tag = point_tag(g.index, e);
        if (obs.needs_direction()) {
            try {
                row.direction = cfg.direction.maximal
                                    ? max_emission_direction(ph.array, st.pm, cfg.direction.grid, cfg.direction.detector_radius)
                                    : cfg.direction.fixed;
            } catch (const Error& ex) {
                errors.push_back(std::string("direction: ") + ex.what());
            }
        }
        if (obs.needs_line_shape() && row.direction) {
            try {
                SpectrumResult sr;
                if (e == Engine::Exact) {
                    SpectrumOptions so = cfg.spectrum;
                    if (so.half_width == 0.0) so.half_width = default_half_width(ph.c, ph.pump);
                    sr = far_field_spectrum(*st.L, *st.rho, ph.array, *row.direction, so);
                } else {
                    sr = far_field_spectrum(regression_model(*st.moments, ph.c, ph.pump), ph.array, *row.direction, cfg.spectrum);
                }
                row.fwhm = sr.fwhm;
                row.peak_position = sr.peak_position;
                row.peak_count = sr.peak_count;
                if (sr.dark) row.warnings.push_back("detection direction is dark");
                if (sr.horizon_warning) row.warnings.push_back("correlations not decayed at the sampling horizon");
                if (obs.spectrum && !realization) {
                    artifacts.write("spectra", tag + ".csv", sr.to_csv());
                    artifacts.write("spectra", tag + ".json", sr.to_json());
                }
            } catch (const Error& ex) {
                errors.push_back(std::string("spectrum: ") + ex.what());
            }
        }
        if (obs.g2 && e == Engine::Exact && row.direction) {
            try {
                row.g2 = g2_zero(*st.rho, ph.array, *row.direction, G2Ordering::FieldOperator);
                row.g2_photodetection = g2_zero(*st.rho, ph.array, *row.direction, G2Ordering::Photodetection);
            } catch (const Error& ex) {
                errors.push_back(std::string("g2: ") + ex.what());
            }
        }
        if (obs.map) {
            try {
                const PlaneSpec plane = placed_plane(cfg.map, ph.array.centroid());
                const auto map = field_intensity_map(ph.array, st.pm, plane);
                const auto [u0, v0] = in_plane(plane, ph.array.centroid());
                row.anisotropy = anisotropy_ratio(map, u0, v0, cfg.map.annulus_inner, cfg.map.annulus_outer);
                if (!realization) artifacts.write("maps", tag + ".csv", map.to_csv());
            } catch (const Error& ex) {
                errors.push_back(std::string("map: ") + ex.what());
            }
        }
        if (!errors.empty()) row.status = RowStatus::Partial;
    } catch (const std::exception& ex) {
        row.status = RowStatus::Failed;
        errors.insert(errors.begin(), ex.what());
    }
    for (std::size_t i = 0; i < errors.size(); ++i) row.error += (i ? "; " : "") + errors[i];
    row.wall_time = seconds_since(t0);
    return row;
}

/// Mean and standard error; exact when every sample is equal.
std::pair<double, double> mean_stderr(const std::vector<double>& x) {
    const double base = x.front();
    double shift = 0.0;
    for (double v : x) shift += v - base;
    const double mean = base + shift / static_cast<double>(x.size());
    if (x.size() < 2) return {mean, 0.0};
    double ss = 0.0;
    for (double v : x) ss += (v - mean) * (v - mean);
    return {mean, std::sqrt(ss / static_cast<double>(x.size() - 1) / static_cast<double>(x.size()))};
}

RowResult aggregate(const GridPoint& g, Engine e, const std::vector<RowResult>& reals) {
    RowResult row;
    row.point = g;
    row.engine = e;
    row.realizations = reals.size();
    std::vector<double> em, fw, pk;
    bool converged = true;
    std::size_t peak_count_max = 0;
    bool have_peaks = false;
    for (const auto& r : reals) {
        row.wall_time += r.wall_time;
        row.weak_pump = r.weak_pump;
        if (r.status == RowStatus::Failed) {
            ++row.failed_realizations;
            continue;
        }
        if (r.independent) row.independent = r.independent;
        converged = converged && r.converged.value_or(false);
        if (r.emission) em.push_back(*r.emission);
        if (r.fwhm) fw.push_back(*r.fwhm);
        if (r.peak_position) pk.push_back(*r.peak_position);
        if (r.peak_count) {
            peak_count_max = std::max(peak_count_max, *r.peak_count);
            have_peaks = true;
        }
        if (r.status == RowStatus::Partial) ++row.failed_realizations;
    }
    row.degraded = 5 * row.failed_realizations > reals.size();
    if (em.empty()) {
        row.status = RowStatus::Failed;
        row.error = "all realizations failed";
        for (const auto& r : reals) {
            if (!r.error.empty()) {
                row.error += ": " + r.error;
                break;
            }
        }
        return row;
    }
    row.converged = converged;
    std::tie(row.emission, row.emission_stderr) = mean_stderr(em);
    if (!fw.empty()) std::tie(row.fwhm, row.fwhm_stderr) = mean_stderr(fw);
    if (!pk.empty()) std::tie(row.peak_position, row.peak_position_stderr) = mean_stderr(pk);
    if (have_peaks) row.peak_count = peak_count_max;
    if (row.failed_realizations > 0) {
        row.status = RowStatus::Partial;
        row.error = std::to_string(row.failed_realizations) + " of " + std::to_string(reals.size()) + " realizations failed";
    }
    if (row.degraded) row.warnings.push_back("more than 20% of realizations failed");
    return row;
}

std::vector<Engine> engines_of(Engine e) {
    if (e == Engine::Both) return {Engine::Exact, Engine::Cumulant};
    return {e};
}

void cross_check(std::vector<RowResult>& rows, double tol) {
    for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
        auto& ex = rows[i];
        auto& cu = rows[i + 1];
        if (ex.engine != Engine::Exact || cu.engine != Engine::Cumulant || ex.point.index != cu.point.index) continue;
        if (!ex.emission || !cu.emission || !(*ex.emission > 0)) continue;
        const double rel = std::abs(*ex.emission - *cu.emission) / *ex.emission;
        for (auto* r : {&ex, &cu}) {
            r->cross_check_rel_diff = rel;
            r->cross_check_flag = rel > tol;
        }
    }
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out(1);
    bool quoted_field = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted_field) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                out.back() += '"';
                ++i;
            } else if (c == '"') {
                quoted_field = false;
            } else {
                out.back() += c;
            }
        } else if (c == '"') {
            quoted_field = true;
        } else if (c == ',') {
            out.emplace_back();
        } else {
            out.back() += c;
        }
    }
    return out;
}

std::vector<std::vector<std::string>> read_csv(const fs::path& path) {
    std::istringstream in(read_text_file(path));
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty()) rows.push_back(split_csv_line(line));
    }
    return rows;
}

std::optional<double> parse_number(const std::string& s) {
    if (s.empty()) return std::nullopt;
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size()) return std::nullopt;
    return v;
}

} // namespace

const char* library_version() { return SUPERRAD_VERSION; }

std::size_t SweepResult::count(RowStatus s) const {
    return static_cast<std::size_t>(std::count_if(rows.begin(), rows.end(), [s](const RowResult& r) { return r.status == s; }));
}

std::size_t SweepResult::flagged() const {
    return static_cast<std::size_t>(std::count_if(rows.begin(), rows.end(), [](const RowResult& r) {
        return r.cross_check_flag && r.engine == Engine::Exact;
    }));
}

int SweepResult::exit_code() const {
    if (rows.empty()) return 0;
    const auto failed = count(RowStatus::Failed);
    if (failed == rows.size()) return 3;
    return failed + count(RowStatus::Partial) > 0 ? 2 : 0;
}

std::string SweepResult::results_csv() const {
    std::string out = header_line(kResultColumns);
    for (const auto& r : rows) {
        const auto& g = r.point;
        std::optional<double> ratio;
        if (r.emission && r.independent && *r.independent > 0) ratio = *r.emission / *r.independent;
        std::optional<double> phi, theta;
        if (r.direction) {
            phi = r.direction->phi;
            theta = r.direction->theta;
        }
        out += join_row({std::to_string(g.index), std::to_string(g.n), std::to_string(g.n_pumped), format_double(g.spacing),
                         format_double(g.rate), to_string(r.engine), to_string(r.status), cell(r.emission),
                         cell(r.independent), cell(ratio), cell(r.total_population), cell(r.balance_residual),
                         r.converged ? cell(*r.converged) : "", cell(phi), cell(theta), cell(r.fwhm),
                         cell(r.peak_position), cell(r.peak_count), cell(r.g2), cell(r.g2_photodetection),
                         cell(r.anisotropy), cell(r.emission_stderr), cell(r.fwhm_stderr),
                         cell(r.peak_position_stderr), std::to_string(r.realizations),
                         std::to_string(r.failed_realizations), cell(r.degraded), cell(r.cross_check_rel_diff),
                         cell(r.cross_check_flag), cell(r.weak_pump), quoted(r.error)});
    }
    return out;
}

std::string SweepResult::realizations_csv() const {
    std::string out = header_line(kRealizationColumns);
    for (const auto& r : realizations) {
        out += join_row({std::to_string(r.point), std::to_string(r.realization), to_string(r.engine), to_string(r.status),
                         std::to_string(r.resamples), cell(r.converged), cell(r.emission), cell(r.fwhm),
                         cell(r.peak_position), cell(r.peak_count), quoted(r.error)});
    }
    return out;
}

std::string SweepResult::summary_json(const ExperimentConfig& cfg) const {
    json j;
    j["name"] = name;
    j["library_version"] = library_version();
    j["schema_version"] = cfg.schema_version;
    j["engine"] = to_string(cfg.engine);
    if (cfg.disorder) {
        j["seed"] = cfg.disorder->seed;
        j["realizations"] = cfg.disorder->realizations;
        j["epsilon"] = cfg.disorder->epsilon;
    }
    j["workers"] = workers;
    j["rows"] = rows.size();
    j["ok"] = count(RowStatus::Ok);
    j["partial"] = count(RowStatus::Partial);
    j["failed"] = count(RowStatus::Failed);
    j["cross_check_flagged"] = flagged();
    std::size_t strong = 0;
    for (const auto& r : rows) {
        if (r.engine == Engine::Exact && r.cross_check_flag && !r.weak_pump) ++strong;
    }
    j["cross_check_flagged_strong_pump"] = strong;
    j["exit_code"] = exit_code();
    j["wall_time_s"] = wall_time;
    json pts = json::array();
    for (const auto& r : rows) {
        json p;
        p["point"] = r.point.index;
        p["engine"] = to_string(r.engine);
        p["status"] = to_string(r.status);
        if (r.converged) p["converged"] = *r.converged;
        p["wall_time_s"] = r.wall_time;
        if (!r.warnings.empty()) p["warnings"] = r.warnings;
        if (!r.error.empty()) p["error"] = r.error;
        pts.push_back(std::move(p));
    }
    j["points"] = std::move(pts);
    return j.dump(2) + "\n";
}

SweepResult run(const ExperimentConfig& cfg, const RunOptions& opts) {
    validate(cfg);
    const auto t0 = Clock::now();
    const auto grid = expand_grid(cfg);
    const auto engines = engines_of(cfg.engine);

    ArtifactDir artifacts;
    std::optional<fs::path> log_path;
    if (opts.write_artifacts) {
        const fs::path root = opts.output_dir.value_or(fs::path(cfg.output_dir));
        fs::create_directories(root);
        artifacts.root = root;
        write_text_file(root / "config.json", cfg.source.empty() ? config_to_json(cfg) : cfg.source);
        log_path = root / "run.log";
    }
    RunLog log(log_path ? &*log_path : nullptr);
    log.line("superrad " + std::string(library_version()) + " run '" + cfg.name + "': " + std::to_string(grid.size()) +
             " points, engine " + to_string(cfg.engine));

    const std::size_t reals = cfg.disorder ? cfg.disorder->realizations : 1;
    const std::size_t per_point = engines.size() * reals;
    std::vector<RowResult> items(grid.size() * per_point);
    std::vector<std::size_t> resamples(items.size(), 0);

    SweepResult result;
    result.name = cfg.name;
    result.workers = opts.workers.value_or(worker_count());
    parallel_for(
        items.size(),
        [&](std::size_t k) {
            const auto& g = grid[k / per_point];
            const Engine e = engines[(k % per_point) / reals];
            const std::optional<std::size_t> realization =
                cfg.disorder ? std::optional<std::size_t>(k % reals) : std::nullopt;
            items[k] = evaluate(cfg, g, e, realization, artifacts, &resamples[k]);
            const auto& r = items[k];
            std::string msg = "point " + std::to_string(g.index) + " " + to_string(e);
            if (realization) msg += " realization " + std::to_string(*realization);
            msg += ": " + to_string(r.status) + " (" + format_double(std::round(r.wall_time * 1000) / 1000) + " s)";
            if (r.emission) msg += " emission " + format_double(*r.emission);
            if (!r.error.empty()) msg += " error: " + r.error;
            for (const auto& w : r.warnings) msg += " warning: " + w;
            log.line(msg);
        },
        result.workers);

    if (!cfg.disorder) {
        result.rows = std::move(items);
    } else {
        for (std::size_t p = 0; p < grid.size(); ++p) {
            for (std::size_t ei = 0; ei < engines.size(); ++ei) {
                const std::size_t first = p * per_point + ei * reals;
                std::vector<RowResult> slice(items.begin() + static_cast<std::ptrdiff_t>(first),
                                             items.begin() + static_cast<std::ptrdiff_t>(first + reals));
                for (std::size_t r = 0; r < reals; ++r) {
                    const auto& it = slice[r];
                    RealizationRecord rec;
                    rec.point = p;
                    rec.realization = r;
                    rec.engine = engines[ei];
                    rec.status = it.status;
                    rec.error = it.error;
                    rec.resamples = resamples[first + r];
                    rec.converged = it.converged.value_or(false);
                    rec.emission = it.emission;
                    rec.fwhm = it.fwhm;
                    rec.peak_position = it.peak_position;
                    rec.peak_count = it.peak_count;
                    result.realizations.push_back(std::move(rec));
                }
                result.rows.push_back(aggregate(grid[p], engines[ei], slice));
            }
        }
    }
    if (cfg.engine == Engine::Both) cross_check(result.rows, cfg.tolerances.cross_check);
    result.wall_time = seconds_since(t0);

    log.line("finished: " + std::to_string(result.count(RowStatus::Ok)) + " ok, " +
             std::to_string(result.count(RowStatus::Partial)) + " partial, " +
             std::to_string(result.count(RowStatus::Failed)) + " failed, " + std::to_string(result.flagged()) +
             " cross-check flags");
    if (artifacts.root) {
        write_text_file(*artifacts.root / "results.csv", result.results_csv());
        write_text_file(*artifacts.root / "summary.json", result.summary_json(cfg));
        if (cfg.disorder) write_text_file(*artifacts.root / "realizations.csv", result.realizations_csv());
    }
    return result;
}

SweepResult disorder_ensemble(const ExperimentConfig& cfg, const RunOptions& opts) {
    if (!cfg.disorder) throw ValidationError("disorder: block required for an ensemble run");
    return run(cfg, opts);
}

CompareReport compare_runs(const fs::path& a, const fs::path& b, double tol) {
    if (!(tol >= 0)) throw InvalidInput("compare: tolerance must be non-negative");
    const auto ra = read_csv(a / "results.csv");
    const auto rb = read_csv(b / "results.csv");
    CompareReport rep;
    auto mismatch = [&](const std::string& what) {
        rep.equal = false;
        if (rep.mismatches.size() < 50) rep.mismatches.push_back(what);
    };
    if (ra.empty() || rb.empty()) throw InvalidInput("compare: empty results.csv");
    if (ra.front() != rb.front()) {
        mismatch("header differs");
        return rep;
    }
    if (ra.size() != rb.size()) mismatch("row count differs: " + std::to_string(ra.size() - 1) + " vs " + std::to_string(rb.size() - 1));
    const auto& head = ra.front();
    for (std::size_t i = 1; i < std::min(ra.size(), rb.size()); ++i) {
        ++rep.rows_compared;
        if (ra[i].size() != rb[i].size()) {
            mismatch("row " + std::to_string(i) + ": column count differs");
            continue;
        }
        for (std::size_t k = 0; k < ra[i].size(); ++k) {
            const auto& x = ra[i][k];
            const auto& y = rb[i][k];
            const std::string col = k < head.size() ? head[k] : std::to_string(k);
            const auto nx = parse_number(x), ny = parse_number(y);
            if (nx && ny) {
                const double diff = std::abs(*nx - *ny);
                if (std::isnan(*nx) != std::isnan(*ny)) {
                    mismatch("row " + std::to_string(i) + " " + col + ": " + x + " vs " + y);
                    continue;
                }
                if (std::isnan(*nx) || *nx == *ny) continue;
                const double scale = std::max({1.0, std::abs(*nx), std::abs(*ny)});
                rep.max_abs_diff = std::max(rep.max_abs_diff, diff);
                rep.max_rel_diff = std::max(rep.max_rel_diff, diff / scale);
                if (!(diff <= tol * scale)) mismatch("row " + std::to_string(i) + " " + col + ": " + x + " vs " + y);
            } else if (x != y) {
                mismatch("row " + std::to_string(i) + " " + col + ": '" + x + "' vs '" + y + "'");
            }
        }
    }
    return rep;
}

} // namespace superrad
