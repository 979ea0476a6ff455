#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "superrad/full_quantum.hpp"
#include "superrad/geometry.hpp"
#include "superrad/observables.hpp"

namespace superrad {

const char* library_version();

inline constexpr int kConfigSchemaVersion = 1;

enum class Engine { Exact, Cumulant, Both };

struct ObservableSet {
    bool emission = true; ///< always computed; listed for completeness
    bool direction = false;
    bool spectrum = false;  ///< line shape plus a spectrum CSV per row
    bool linewidth = false; ///< line shape only
    bool g2 = false;
    bool map = false;

    bool needs_direction() const { return direction || spectrum || linewidth || g2; }
    bool needs_line_shape() const { return spectrum || linewidth; }
};

/// Detection direction: the maximal-emission direction of each row, or fixed.
struct DirectionChoice {
    bool maximal = true;
    Direction fixed;
    AngularGrid grid;
    double detector_radius = kDefaultDetectorRadius;
};

struct MapSettings {
    PlaneSpec plane;            ///< in-plane ranges relative to the array centroid when `centered`
    bool centered = true;
    double annulus_inner = 0.8; ///< anisotropy annulus around the centroid projection
    double annulus_outer = 1.0;
};

struct Tolerances {
    double cross_check = 0.05;      ///< relative emission difference flagged in engine=both runs
    std::size_t exact_cap = kDefaultExactCap;
    double balance_exact = 1e-6;
    double balance_cumulant = 1e-4;
    double steady_residual = 1e-10; ///< exact engine max|L[rho]|
    double cumulant_rhs = 1e-9;     ///< cumulant stationarity threshold
};

/// Swept axis: absent, or a non-empty strictly ascending list.
template <class T>
using SweepAxis = std::optional<std::vector<T>>;

struct ExperimentConfig {
    int schema_version = kConfigSchemaVersion;
    std::string name;

    // Geometry: a chain of `n` emitters at `spacing` along x, or explicit positions.
    std::size_t n = 1;
    double spacing = 0.1;
    Vec3 dipole = Vec3(0, 0, 1);
    double gamma0 = 1.0;
    std::optional<std::vector<Vec3>> positions;

    // Pump: the first (or last) n_pumped emitters at `rate`, or explicit rates.
    std::size_t n_pumped = 1;
    double rate = 1.0;
    bool pump_last = false;
    std::optional<std::vector<double>> rates;

    Engine engine = Engine::Cumulant;

    SweepAxis<std::size_t> n_grid;
    SweepAxis<std::size_t> n_pumped_grid;
    SweepAxis<double> spacing_grid;
    SweepAxis<double> rate_grid;

    ObservableSet observables;
    DirectionChoice direction;
    SpectrumOptions spectrum;
    MapSettings map;
    std::optional<DisorderConfig> disorder;
    std::string output_dir = "run";
    Tolerances tolerances;

    /// Source text of the configuration, copied verbatim into the run directory.
    std::string source;
};

/// Parses a JSON configuration. Unknown keys, wrong types and violated
/// invariants raise ValidationError naming the offending entry.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Canonical JSON form of a configuration; parse_config accepts it back.
std::string config_to_json(const ExperimentConfig& cfg);

/// Invariants: sweep grids non-empty and strictly ascending; N <= exact_cap
/// whenever the exact engine runs; g2 needs the exact engine; n_pumped <= N;
/// disorder needs a chain and at least two realizations.
void validate(const ExperimentConfig& cfg);

struct GridPoint {
    std::size_t index = 0;
    std::size_t n = 0;
    std::size_t n_pumped = 0;
    double spacing = 0.0;
    double rate = 0.0;
};

/// Cartesian product of the sweep axes, N outermost, then n_pumped, spacing
/// and rate.
std::vector<GridPoint> expand_grid(const ExperimentConfig& cfg);

enum class RowStatus { Ok, Partial, Failed };

/// Observables of one grid point computed by one engine. Unset optionals
/// were not requested or failed (see `error`).
struct RowResult {
    GridPoint point;
    Engine engine = Engine::Exact; ///< Exact or Cumulant
    RowStatus status = RowStatus::Ok;
    std::string error;
    std::vector<std::string> warnings;
    double wall_time = 0.0;

    std::optional<double> emission, independent, total_population, balance_residual;
    std::optional<bool> converged;
    std::optional<Direction> direction;
    std::optional<double> fwhm, peak_position;
    std::optional<std::size_t> peak_count;
    std::optional<double> g2, g2_photodetection;
    std::optional<double> anisotropy;

    // Disorder ensembles: the values above are means over realizations.
    std::optional<double> emission_stderr, fwhm_stderr, peak_position_stderr;
    std::size_t realizations = 1;
    std::size_t failed_realizations = 0;
    bool degraded = false;

    // engine=both: |I_exact - I_cumulant| / I_exact on both rows of a point.
    std::optional<double> cross_check_rel_diff;
    bool cross_check_flag = false;
    bool weak_pump = false; ///< max pump rate <= gamma0, where the truncation is known to be poor
};

/// Per-realization record of a disorder ensemble.
struct RealizationRecord {
    std::size_t point = 0;
    std::size_t realization = 0;
    Engine engine = Engine::Exact;
    RowStatus status = RowStatus::Ok;
    std::string error;
    std::size_t resamples = 0;
    bool converged = false;
    std::optional<double> emission, fwhm, peak_position;
    std::optional<std::size_t> peak_count;
};

struct SweepResult {
    std::string name;
    std::vector<RowResult> rows;                  ///< point-major, exact before cumulant
    std::vector<RealizationRecord> realizations;  ///< disorder runs only
    double wall_time = 0.0;
    std::size_t workers = 1;

    std::size_t count(RowStatus s) const;
    std::size_t flagged() const;

    /// 0 when every row is ok, 3 when every row failed, 2 otherwise.
    int exit_code() const;

    /// Deterministic CSV: no timings, doubles printed with %.15g.
    std::string results_csv() const;
    std::string realizations_csv() const;
    std::string summary_json(const ExperimentConfig& cfg) const;
};

struct RunOptions {
    std::optional<std::filesystem::path> output_dir; ///< overrides cfg.output_dir
    std::optional<std::size_t> workers;              ///< overrides worker_count()
    bool write_artifacts = true;
};

/// Runs every grid point (and disorder realization) on a bounded worker pool
/// and writes config.json, results.csv, summary.json, run.log and, when
/// requested, spectra/, maps/ and realizations.csv into the run directory.
/// Per-row failures are recorded and the run continues. Throws
/// ValidationError before any computation when the config is invalid.
SweepResult run(const ExperimentConfig& cfg, const RunOptions& opts = {});

/// Same as run() but requires a disorder block.
SweepResult disorder_ensemble(const ExperimentConfig& cfg, const RunOptions& opts = {});

struct CompareReport {
    bool equal = true;
    std::size_t rows_compared = 0;
    double max_abs_diff = 0.0;
    double max_rel_diff = 0.0;
    std::vector<std::string> mismatches;
};

/// Compares results.csv of two run directories cell by cell. Numeric cells
/// match when |a - b| <= tol * max(1, |a|, |b|); other cells must be equal.
CompareReport compare_runs(const std::filesystem::path& a, const std::filesystem::path& b, double tol);

std::string to_string(Engine e);
std::string to_string(RowStatus s);

} // namespace superrad
