// Acceptance run: one PASS/FAIL line per criterion. `--only k` runs a single
// criterion; the exit status is non-zero when any selected criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "superrad/coupling.hpp"
#include "superrad/cumulant.hpp"
#include "superrad/full_quantum.hpp"
#include "superrad/harness.hpp"
#include "superrad/observables.hpp"
#include "superrad/serialization.hpp"

using namespace superrad;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        pass = pass && ok;
        if (!detail.empty()) detail += "; ";
        detail += (ok ? "" : "[x] ") + what;
    }
};

std::string fmt(double v, int digits = 4) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*g", digits, v);
    return buf;
}

SweepResult run_config(const std::string& text) {
    return run(parse_config(text), RunOptions{std::nullopt, std::nullopt, false});
}

const RowResult& row(const SweepResult& r, std::size_t n, std::size_t np, double rate, Engine e) {
    for (const auto& x : r.rows) {
        if (x.point.n == n && x.point.n_pumped == np && x.point.rate == rate && x.engine == e) return x;
    }
    throw std::runtime_error("missing row");
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

Outcome single_emitter_population() {
    Outcome o;
    const auto c = coupling_matrices(build_chain(1, 0.3, Vec3(0, 0, 1)));
    double worst = 0.0;
    for (double r : {0.1, 1.0, 10.0, 40.0}) {
        const PumpPattern p({r});
        const double expected = r / (r + 1.0);
        const double exact = pair_correlations(steady_state(Liouvillian(c, p))).populations(0);
        const auto cum = cumulant_steady_state(c, p);
        worst = std::max({worst, std::abs(exact - expected), std::abs(cum.state.ee(0) - expected)});
    }
    o.require(worst < 1e-6, "max |error| " + fmt(worst, 3) + " over R in {0.1,1,10,40}, both engines");
    return o;
}

Outcome single_emitter_spectrum() {
    Outcome o;
    const auto array = build_chain(1, 0.3, Vec3(0, 0, 1));
    const auto c = coupling_matrices(array);
    const Direction dir{0.0, kPi / 2};
    for (double r : {1.0, 10.0}) {
        const PumpPattern p({r});
        const auto ss = cumulant_steady_state(c, p).state;
        const auto cum = far_field_spectrum(regression_model(ss, c, p), array, dir);
        const Liouvillian L(c, p);
        SpectrumOptions so;
        so.half_width = default_half_width(c, p);
        const auto exact = far_field_spectrum(L, steady_state(L), array, dir, so);
        const double target = 1.0 + r;
        o.require(rel(cum.fwhm, target) < 0.02 && rel(exact.fwhm, target) < 0.02,
                  "R=" + fmt(r) + ": FWHM cumulant " + fmt(cum.fwhm, 6) + ", exact " + fmt(exact.fwhm, 6) + " vs " + fmt(target));
    }
    return o;
}

Outcome independent_limit() {
    Outcome o;
    const auto array = build_chain(8, 50.0, Vec3(0, 0, 1));
    const auto c = coupling_matrices(array);
    const auto p = pump_pattern_first(8, 8, 10.0);
    const auto rho = steady_state(Liouvillian(c, p));
    const double emission = total_emission(c, pair_correlations(rho).coherences);
    const double expected = 8.0 * 10.0 / 11.0;
    o.require(rel(emission, expected) < 0.01, "I = " + fmt(emission, 7) + " vs N R/(R+1) = " + fmt(expected, 7));
    double lo = 1e300, hi = 0.0;
    for (const Direction d : {Direction{0.0, kPi / 2}, Direction{kPi / 3, kPi / 2}, Direction{1.0, 1.0},
                              Direction{2.0, 0.6}, Direction{4.0, 2.0}, Direction{5.5, 1.3}}) {
        const double g = g2_zero(rho, array, d);
        lo = std::min(lo, g);
        hi = std::max(hi, g);
    }
    o.require(hi / lo - 1.0 < 0.01, "g2 over six directions in [" + fmt(lo, 6) + ", " + fmt(hi, 6) + "]");
    return o;
}

const char* kEngineBenchmark = R"({"schema_version": 1, "name": "engines", "geometry": {"n": 8, "spacing": 0.1},
    "pump": {"n_pumped": 8}, "engine": "both", "sweep": {"n_pumped": [4, 8], "rate": [0.1, 1.5, 20]}})";

Outcome engine_agreement() {
    Outcome o;
    const auto r = run_config(kEngineBenchmark);
    for (std::size_t np : {8u, 4u}) {
        for (double rate : {1.5, 20.0}) {
            const auto& ex = row(r, 8, np, rate, Engine::Exact);
            const auto& cu = row(r, 8, np, rate, Engine::Cumulant);
            const double de = rel(*cu.emission, *ex.emission);
            const double dp = rel(*cu.total_population, *ex.total_population);
            o.require(de < 0.05 && dp < 0.05, "N_p=" + std::to_string(np) + " R=" + fmt(rate) + ": emission " +
                                                  fmt(100 * de, 3) + "%, population " + fmt(100 * dp, 3) + "%");
        }
        const auto& weak = row(r, 8, np, 0.1, Engine::Exact);
        o.require(weak.cross_check_flag && *weak.cross_check_rel_diff > 0.05,
                  "N_p=" + std::to_string(np) + " R=0.1: emission " + fmt(100 * *weak.cross_check_rel_diff, 3) +
                      "% (flag " + (weak.cross_check_flag ? "set" : "unset") + ")");
    }
    return o;
}

const char* kCrossover = R"({"schema_version": 1, "name": "crossover", "geometry": {"n": 8, "spacing": 0.05},
    "pump": {"n_pumped": 4}, "engine": "exact", "sweep": {"n_pumped": [4, 8], "rate": [0.2, 10, 20]}})";

Outcome crossover() {
    Outcome o;
    const auto r = run_config(kCrossover);
    auto ratio = [&](std::size_t np, double rate) {
        const auto& x = row(r, 8, np, rate, Engine::Exact);
        return *x.emission / *x.independent;
    };
    o.require(ratio(4, 0.2) < 1.0, "I/I_ind(R=0.2) = " + fmt(ratio(4, 0.2)));
    o.require(ratio(4, 10) > 1.0, "I/I_ind(R=10) = " + fmt(ratio(4, 10)));
    o.require(ratio(4, 20) > ratio(8, 20),
              "R=20: N_p=4 " + fmt(ratio(4, 20)) + " vs N_p=8 " + fmt(ratio(8, 20)));
    return o;
}

Outcome photon_balance() {
    Outcome o;
    double worst_exact = 0.0, worst_cumulant = 0.0;
    std::size_t states = 0;
    const std::string independent = R"({"schema_version": 1, "name": "independent", "geometry": {"n": 8, "spacing": 50},
        "pump": {"n_pumped": 8, "rate": 10}, "engine": "exact"})";
    for (const std::string& text : {independent, std::string(kEngineBenchmark), std::string(kCrossover)}) {
        for (const auto& x : run_config(text).rows) {
            ++states;
            auto& worst = x.engine == Engine::Exact ? worst_exact : worst_cumulant;
            worst = std::max(worst, *x.balance_residual);
        }
    }
    o.require(worst_exact < 1e-6, "exact max relative residual " + fmt(worst_exact, 3));
    o.require(worst_cumulant < 1e-4, "cumulant max relative residual " + fmt(worst_cumulant, 3));
    o.detail += " over " + std::to_string(states) + " steady states";
    return o;
}

Outcome linewidth_collapse() {
    Outcome o;
    const auto r = run_config(R"({"schema_version": 1, "name": "collapse", "geometry": {"n": 4, "spacing": 0.05},
        "pump": {"n_pumped": 4, "rate": 20}, "engine": "cumulant", "sweep": {"n": [4, 5, 6, 8, 10, 14, 20]},
        "observables": ["linewidth"]})");
    std::map<std::size_t, const RowResult*> by_n;
    std::string widths;
    for (const auto& x : r.rows) {
        by_n[x.point.n] = &x;
        widths += (widths.empty() ? "" : " ") + std::to_string(x.point.n) + ":" + fmt(*x.fwhm, 3);
    }
    o.require(*by_n[4]->fwhm >= 10.0, "FWHM(N=4) " + fmt(*by_n[4]->fwhm, 3) + " >= 10");
    bool narrow = true;
    for (std::size_t n : {8u, 10u, 14u, 20u}) narrow = narrow && *by_n[n]->fwhm <= 2.0;
    o.require(narrow, "FWHM <= 2 for N >= 8 [" + widths + "]");
    o.require(*by_n[5]->fwhm > 2.0 && *by_n[8]->fwhm <= 2.0, "drop between N=5 and N=8");
    const double p4 = std::abs(*by_n[4]->peak_position), p20 = std::abs(*by_n[20]->peak_position);
    o.require(p4 >= 3.0 * p20, "|peak| N=4 " + fmt(p4) + " vs N=20 " + fmt(p20));
    return o;
}

Outcome synchronization() {
    Outcome o;
    const auto r = run_config(R"({"schema_version": 1, "name": "sync", "geometry": {"n": 12, "spacing": 0.05},
        "pump": {"n_pumped": 4}, "engine": "cumulant", "sweep": {"n_pumped": [4, 12], "rate": [0.2, 20]},
        "observables": ["linewidth"]})");
    const auto& weak = row(r, 12, 12, 0.2, Engine::Cumulant);
    o.require(*weak.peak_count >= 2, "N_p=12 R=0.2: " + std::to_string(*weak.peak_count) + " peaks");
    const auto& lasing = row(r, 12, 4, 20.0, Engine::Cumulant);
    o.require(*lasing.peak_count == 1, "N_p=4 R=20: " + std::to_string(*lasing.peak_count) + " peak");
    o.require(std::abs(*lasing.peak_position) < 2.0, "N_p=4 R=20: peak at " + fmt(*lasing.peak_position));
    return o;
}

Outcome directionality() {
    Outcome o;
    const auto r = run_config(R"({"schema_version": 1, "name": "dir", "geometry": {"n": 15, "spacing": 0.15},
        "pump": {"n_pumped": 5, "rate": 10}, "engine": "cumulant", "sweep": {"n_pumped": [5, 15]},
        "observables": ["direction", "map"], "map": {"normal": "z", "offset": 1.0, "points": [161, 161]}})");
    const auto& five = row(r, 15, 5, 10.0, Engine::Cumulant);
    const auto& all = row(r, 15, 15, 10.0, Engine::Cumulant);
    o.require(*five.anisotropy > *all.anisotropy,
              "anisotropy N_p=5 " + fmt(*five.anisotropy) + " vs N_p=15 " + fmt(*all.anisotropy));
    o.require(five.direction->phi == kPi && five.direction->theta == kPi / 2,
              "max direction (" + fmt(five.direction->phi) + ", " + fmt(five.direction->theta) + ")");
    return o;
}

Outcome coherence() {
    Outcome o;
    const auto r = run_config(R"({"schema_version": 1, "name": "g2", "geometry": {"n": 8, "spacing": 0.05},
        "pump": {"n_pumped": 2}, "engine": "exact", "sweep": {"n_pumped": [2, 4], "rate": [0.1, 20]},
        "observables": ["g2"]})");
    for (std::size_t np : {2u, 4u}) {
        const auto& above = row(r, 8, np, 20.0, Engine::Exact);
        const auto& below = row(r, 8, np, 0.1, Engine::Exact);
        const std::string tag = "N_p=" + std::to_string(np);
        o.require(*above.g2 >= 0.8 && *above.g2 <= 1.4,
                  tag + " R=20 g2 " + fmt(*above.g2) + " (photodetection order " + fmt(*above.g2_photodetection) + ")");
        o.require(std::abs(*below.g2 - 1.0) > std::abs(*above.g2 - 1.0),
                  tag + " R=0.1 g2 " + fmt(*below.g2) + " (photodetection order " + fmt(*below.g2_photodetection) + ")");
    }
    return o;
}

Outcome disorder_robustness() {
    Outcome o;
    const std::string base = R"({"schema_version": 1, "name": "disorder", "geometry": {"n": 14, "spacing": 0.05},
        "pump": {"n_pumped": 6, "rate": 20}, "engine": "cumulant", "observables": ["linewidth"])";
    const auto ordered = run_config(base + "}");
    const auto ensemble = run_config(base + R"(, "disorder": {"epsilon": 0.05, "realizations": 50, "seed": 7}})");
    const auto& a = ordered.rows.at(0);
    const auto& b = ensemble.rows.at(0);
    o.require(b.failed_realizations == 0, std::to_string(b.failed_realizations) + " failed realizations");
    o.require(rel(*b.fwhm, *a.fwhm) < 0.2, "mean FWHM " + fmt(*b.fwhm) + " +- " + fmt(*b.fwhm_stderr, 2) +
                                              " vs ordered " + fmt(*a.fwhm));
    o.require(*b.emission < *a.emission, "mean emission " + fmt(*b.emission) + " +- " + fmt(*b.emission_stderr, 2) +
                                             " vs ordered " + fmt(*a.emission));
    return o;
}

Outcome determinism() {
    Outcome o;
    const auto cfg = parse_config(R"({"schema_version": 1, "name": "det", "geometry": {"n": 5, "spacing": 0.08},
        "pump": {"n_pumped": 2, "rate": 10}, "engine": "both", "sweep": {"rate": [2, 10]},
        "observables": ["linewidth", "g2"], "disorder": {"epsilon": 0.05, "realizations": 3, "seed": 42}})");
    const fs::path root = fs::temp_directory_path() / ("superrad_acceptance_" + std::to_string(::getpid()));
    fs::remove_all(root);
    run(cfg, RunOptions{root / "a", 1, true});
    run(cfg, RunOptions{root / "b", 2, true});
    for (const char* f : {"results.csv", "realizations.csv"}) {
        o.require(read_text_file(root / "a" / f) == read_text_file(root / "b" / f),
                  std::string(f) + " byte-identical across reruns");
    }
    fs::remove_all(root);
    return o;
}

struct Criterion {
    int id;
    const char* title;
    double budget_s;
    std::function<Outcome()> check;
};

} // namespace

int main(int argc, char** argv) {
    int only = 0;
    for (int i = 1; i < argc; ++i) {
        if (std::string(argv[i]) == "--only" && i + 1 < argc) only = std::atoi(argv[++i]);
    }
    const std::vector<Criterion> criteria = {
        {1, "single-emitter population", 1, single_emitter_population},
        {2, "single-emitter spectrum", 5, single_emitter_spectrum},
        {3, "independent limit", 60, independent_limit},
        {4, "engine agreement", 600, engine_agreement},
        {5, "sub/superradiant crossover", 300, crossover},
        {6, "photon balance", 900, photon_balance},
        {7, "linewidth collapse", 900, linewidth_collapse},
        {8, "spectral synchronization", 600, synchronization},
        {9, "directionality", 300, directionality},
        {10, "g2 coherence", 600, coherence},
        {11, "disorder robustness", 1800, disorder_robustness},
        {12, "determinism", 600, determinism},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        if (only != 0 && c.id != only) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.check();
        } catch (const std::exception& e) {
            o.require(false, std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        o.require(secs < c.budget_s, "runtime " + fmt(secs, 3) + " s < " + fmt(c.budget_s) + " s");
        std::printf("criterion %2d %s: %s | %s\n", c.id, o.pass ? "PASS" : "FAIL", c.title, o.detail.c_str());
        std::fflush(stdout);
        if (!o.pass) ++failures;
    }
    return failures == 0 ? 0 : 1;
}
