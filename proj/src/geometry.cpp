#include "superrad/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "superrad/errors.hpp"
#include "csv_format.hpp"

namespace superrad {

namespace {

// Returns the first coincident pair, or {n, n} when all separations are fine.
std::pair<std::size_t, std::size_t> find_coincident_pair(const std::vector<Vec3>& positions) {
    const std::size_t n = positions.size();
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = a + 1; b < n; ++b) {
            if ((positions[a] - positions[b]).norm() < kCoincidenceDistance) {
                return {a, b};
            }
        }
    }
    return {n, n};
}

// Stream for one disorder realization. Seeding through seed_seq with the
// realization index makes each stream independent of the others and of the
// order in which realizations are evaluated.
std::mt19937_64 realization_stream(std::uint64_t seed, std::size_t realization) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(realization),
                      static_cast<std::uint32_t>(static_cast<std::uint64_t>(realization) >> 32),
                      0x5eedu};
    return std::mt19937_64(seq);
}

double uniform_open(std::mt19937_64& rng) {
    // 53 random bits mapped into (0, 1).
    return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

// Box-Muller; implemented here so draws do not depend on the standard
// library's distribution implementation.
std::pair<double, double> standard_normal_pair(std::mt19937_64& rng) {
    const double u1 = uniform_open(rng);
    const double u2 = uniform_open(rng);
    const double radius = std::sqrt(-2.0 * std::log(u1));
    return {radius * std::cos(2.0 * kPi * u2), radius * std::sin(2.0 * kPi * u2)};
}

} // namespace

EmitterArray::EmitterArray(std::vector<Vec3> positions, const Vec3& dipole, double gamma0)
    : positions_(std::move(positions)), gamma0_(gamma0) {
    if (positions_.empty()) {
        throw InvalidInput("emitter array needs at least one emitter");
    }
    for (const auto& p : positions_) {
        if (!p.allFinite()) {
            throw InvalidInput("emitter position is not finite");
        }
    }
    const double norm = dipole.norm();
    if (!(norm > 0.0) || !std::isfinite(norm)) {
        throw InvalidInput("dipole vector must be non-zero and finite");
    }
    if (!(gamma0 > 0.0) || !std::isfinite(gamma0)) {
        throw InvalidInput("gamma0 must be positive");
    }
    dipole_ = dipole / norm;
    const auto [a, b] = find_coincident_pair(positions_);
    if (a != positions_.size()) {
        std::ostringstream os;
        os << "emitters " << a << " and " << b << " coincide";
        throw DomainError(os.str());
    }
}

Vec3 EmitterArray::centroid() const {
    Vec3 sum = Vec3::Zero();
    for (const auto& p : positions_) sum += p;
    return sum / static_cast<double>(positions_.size());
}

EmitterArray EmitterArray::translated(const Vec3& shift) const {
    std::vector<Vec3> moved = positions_;
    for (auto& p : moved) p += shift;
    return EmitterArray(std::move(moved), dipole_, gamma0_);
}

std::string EmitterArray::positions_csv() const {
    std::string out = "index,x,y,z\n";
    for (std::size_t n = 0; n < positions_.size(); ++n) {
        out += std::to_string(n);
        for (int c = 0; c < 3; ++c) {
            out += ',';
            out += detail::format_double(positions_[n][c]);
        }
        out += '\n';
    }
    return out;
}

PumpPattern::PumpPattern(std::vector<double> rates) : rates_(std::move(rates)) {
    for (double r : rates_) {
        if (!(r >= 0.0) || !std::isfinite(r)) {
            throw InvalidInput("pump rates must be finite and non-negative");
        }
    }
}

double PumpPattern::total() const { return std::accumulate(rates_.begin(), rates_.end(), 0.0); }

double PumpPattern::max_rate() const {
    return rates_.empty() ? 0.0 : *std::max_element(rates_.begin(), rates_.end());
}

bool PumpPattern::any_pumped() const {
    return std::any_of(rates_.begin(), rates_.end(), [](double r) { return r > 0.0; });
}

void DisorderConfig::validate() const {
    if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) {
        throw InvalidInput("disorder epsilon must be finite and non-negative");
    }
    if (realizations < 1) {
        throw InvalidInput("disorder needs at least one realization");
    }
}

EmitterArray build_chain(std::size_t n, double spacing, const Vec3& dipole, double gamma0) {
    if (n < 1) throw InvalidInput("chain needs at least one emitter");
    if (!(spacing > 0.0) || !std::isfinite(spacing)) {
        throw InvalidInput("chain spacing must be positive");
    }
    std::vector<Vec3> positions;
    positions.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
        positions.emplace_back(static_cast<double>(k) * spacing, 0.0, 0.0);
    }
    return EmitterArray(std::move(positions), dipole, gamma0);
}

DisorderedArray apply_disorder(const EmitterArray& array, const DisorderConfig& cfg, double spacing,
                               std::size_t realization) {
    cfg.validate();
    if (realization >= cfg.realizations) {
        throw InvalidInput("realization index out of range");
    }
    if (!(spacing > 0.0)) throw InvalidInput("disorder spacing must be positive");
    if (cfg.epsilon == 0.0) {
        return {array, 0};
    }
    const double sigma = cfg.epsilon * spacing;
    auto rng = realization_stream(cfg.seed, realization);

    constexpr std::size_t kMaxResamples = 1000;
    for (std::size_t attempt = 0; attempt <= kMaxResamples; ++attempt) {
        std::vector<Vec3> moved = array.positions();
        for (auto& p : moved) {
            const auto [dx, dy] = standard_normal_pair(rng);
            p.x() += sigma * dx;
            p.y() += sigma * dy;
        }
        if (find_coincident_pair(moved).first == moved.size()) {
            return {EmitterArray(std::move(moved), array.dipole(), array.gamma0()), attempt};
        }
    }
    throw DomainError("disorder realization keeps producing coincident emitters");
}

PumpPattern pump_pattern_first(std::size_t n, std::size_t n_pumped, double rate) {
    if (n_pumped > n) throw InvalidInput("n_pumped exceeds emitter count");
    std::vector<double> rates(n, 0.0);
    std::fill_n(rates.begin(), n_pumped, rate);
    return PumpPattern(std::move(rates));
}

PumpPattern pump_pattern_last(std::size_t n, std::size_t n_pumped, double rate) {
    if (n_pumped > n) throw InvalidInput("n_pumped exceeds emitter count");
    std::vector<double> rates(n, 0.0);
    std::fill(rates.end() - static_cast<std::ptrdiff_t>(n_pumped), rates.end(), rate);
    return PumpPattern(std::move(rates));
}

} // namespace superrad
