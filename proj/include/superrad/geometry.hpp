#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "superrad/types.hpp"

namespace superrad {

/// Emitter positions (in units of lambda0), a shared real unit dipole and the
/// single-emitter decay rate. Immutable once built.
class EmitterArray {
public:
    /// Validates and normalizes the dipole. Throws InvalidInput for an empty
    /// position list, a zero dipole or a non-positive gamma0, and DomainError
    /// when two emitters coincide.
    EmitterArray(std::vector<Vec3> positions, const Vec3& dipole, double gamma0 = 1.0);

    const std::vector<Vec3>& positions() const noexcept { return positions_; }
    const Vec3& position(std::size_t n) const { return positions_.at(n); }
    const Vec3& dipole() const noexcept { return dipole_; }
    double gamma0() const noexcept { return gamma0_; }
    std::size_t size() const noexcept { return positions_.size(); }

    Vec3 centroid() const;

    /// Copy with every position shifted by `shift`.
    EmitterArray translated(const Vec3& shift) const;

    /// CSV with columns index,x,y,z.
    std::string positions_csv() const;

private:
    std::vector<Vec3> positions_;
    Vec3 dipole_;
    double gamma0_;
};

/// Per-emitter incoherent pump rates R_n (units of gamma0).
class PumpPattern {
public:
    explicit PumpPattern(std::vector<double> rates);

    const std::vector<double>& rates() const noexcept { return rates_; }
    double rate(std::size_t n) const { return rates_.at(n); }
    std::size_t size() const noexcept { return rates_.size(); }
    double total() const;
    double max_rate() const;
    bool any_pumped() const;

private:
    std::vector<double> rates_;
};

struct DisorderConfig {
    double epsilon = 0.0; ///< jitter standard deviation as a fraction of the spacing
    std::size_t realizations = 1;
    std::uint64_t seed = 0;

    void validate() const;
};

struct DisorderedArray {
    EmitterArray array;
    std::size_t resamples = 0; ///< draws rejected because two emitters coincided
};

/// Regular chain along x: positions (k * spacing, 0, 0), k = 0..n-1.
EmitterArray build_chain(std::size_t n, double spacing, const Vec3& dipole, double gamma0 = 1.0);

/// Gaussian jitter of standard deviation epsilon * spacing in x and y.
/// Deterministic in (cfg.seed, realization); independent of evaluation order.
DisorderedArray apply_disorder(const EmitterArray& array, const DisorderConfig& cfg, double spacing,
                               std::size_t realization);

/// First n_pumped emitters pumped at `rate`, the rest unpumped.
PumpPattern pump_pattern_first(std::size_t n, std::size_t n_pumped, double rate);

/// Last n_pumped emitters pumped (mirror image of pump_pattern_first).
PumpPattern pump_pattern_last(std::size_t n, std::size_t n_pumped, double rate);

/// Minimum separation below which two emitters count as coincident.
inline constexpr double kCoincidenceDistance = 1e-9;

} // namespace superrad
