#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "superrad/correlations.hpp"
#include "superrad/cumulant.hpp"
#include "superrad/full_quantum.hpp"
#include "superrad/geometry.hpp"

namespace superrad {

/// Physical parameters stored alongside every serialized object.
struct ParameterBlock {
    std::vector<Vec3> positions;
    Vec3 dipole = Vec3(0, 0, 1);
    double gamma0 = 1.0;
    std::vector<double> rates;

    static ParameterBlock from(const EmitterArray& array, const PumpPattern& pump);
};

template <class T>
struct Stored {
    T value;
    ParameterBlock parameters;
};

/// JSON container layout:
///
///   {"format": "superrad-container", "version": 1,
///    "kind": "density_matrix" | "cumulant_state" | "correlation_series" | "cumulant_trajectory",
///    "shape": {"emitters": N, ...},
///    "parameters": {"positions": [[x,y,z],...], "dipole": [..], "gamma0": g, "rates": [..]},
///    "tau" or "t": [...],            (series only)
///    "data": {...}}
///
/// Complex matrices are stored as {"rows", "cols", "re", "im"} with row-major
/// flat arrays. Doubles round-trip exactly.
inline constexpr int kContainerVersion = 1;

std::string to_container(const DensityMatrix& rho, const ParameterBlock& params);
std::string to_container(const CumulantState& state, const ParameterBlock& params);
std::string to_container(const CorrelationSeries& series, const ParameterBlock& params);
std::string to_container(const CumulantTrajectory& traj, const ParameterBlock& params);

/// Readers throw InvalidInput on a malformed container, a kind mismatch or
/// data whose size disagrees with the shape metadata.
Stored<DensityMatrix> density_matrix_from_container(std::string_view text);
Stored<CumulantState> cumulant_state_from_container(std::string_view text);
Stored<CorrelationSeries> correlation_series_from_container(std::string_view text);
Stored<CumulantTrajectory> cumulant_trajectory_from_container(std::string_view text);

/// The "kind" field of a container.
std::string container_kind(std::string_view text);

void write_text_file(const std::filesystem::path& path, const std::string& text);
std::string read_text_file(const std::filesystem::path& path);

} // namespace superrad
