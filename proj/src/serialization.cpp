#include "superrad/serialization.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "superrad/errors.hpp"

namespace superrad {

namespace {

using json = nlohmann::ordered_json;

constexpr const char* kFormat = "superrad-container";

template <class Matrix>
json matrix_json(const Matrix& m) {
    json out;
    out["rows"] = m.rows();
    out["cols"] = m.cols();
    std::vector<double> re, im;
    re.reserve(static_cast<std::size_t>(m.size()));
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            const cplx z(m(i, j));
            re.push_back(z.real());
            im.push_back(z.imag());
        }
    }
    out["re"] = std::move(re);
    if constexpr (std::is_same_v<typename Matrix::Scalar, cplx>) out["im"] = std::move(im);
    return out;
}

template <class Matrix>
Matrix matrix_from(const json& j, Eigen::Index rows, Eigen::Index cols, const std::string& what) {
    if (j.at("rows").get<Eigen::Index>() != rows || j.at("cols").get<Eigen::Index>() != cols) {
        throw InvalidInput(what + ": shape disagrees with metadata");
    }
    const auto re = j.at("re").get<std::vector<double>>();
    std::vector<double> im;
    constexpr bool complex = std::is_same_v<typename Matrix::Scalar, cplx>;
    if constexpr (complex) im = j.at("im").get<std::vector<double>>();
    const auto n = static_cast<std::size_t>(rows * cols);
    if (re.size() != n || (complex && im.size() != n)) throw InvalidInput(what + ": wrong number of entries");
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index k = 0; k < cols; ++k) {
            const auto idx = static_cast<std::size_t>(i * cols + k);
            if constexpr (complex) {
                m(i, k) = cplx(re[idx], im[idx]);
            } else {
                m(i, k) = re[idx];
            }
        }
    }
    return m;
}

json vec3_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

Vec3 vec3_from(const json& j) {
    const auto v = j.get<std::vector<double>>();
    if (v.size() != 3) throw InvalidInput("container: expected a 3-vector");
    return Vec3(v[0], v[1], v[2]);
}

json parameters_json(const ParameterBlock& p) {
    json out;
    json pos = json::array();
    for (const auto& r : p.positions) pos.push_back(vec3_json(r));
    out["positions"] = std::move(pos);
    out["dipole"] = vec3_json(p.dipole);
    out["gamma0"] = p.gamma0;
    out["rates"] = p.rates;
    return out;
}

ParameterBlock parameters_from(const json& j) {
    ParameterBlock p;
    for (const auto& r : j.at("positions")) p.positions.push_back(vec3_from(r));
    p.dipole = vec3_from(j.at("dipole"));
    p.gamma0 = j.at("gamma0").get<double>();
    p.rates = j.at("rates").get<std::vector<double>>();
    return p;
}

json header(const char* kind, std::size_t emitters, const ParameterBlock& params) {
    json out;
    out["format"] = kFormat;
    out["version"] = kContainerVersion;
    out["kind"] = kind;
    out["shape"] = {{"emitters", emitters}};
    out["parameters"] = parameters_json(params);
    return out;
}

json parse(std::string_view text, const char* kind) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw InvalidInput(std::string("container: ") + e.what());
    }
    if (!j.is_object() || j.value("format", "") != kFormat) throw InvalidInput("container: unrecognized format");
    if (j.value("version", 0) != kContainerVersion) throw InvalidInput("container: unsupported version");
    if (kind != nullptr && j.value("kind", "") != kind) {
        throw InvalidInput(std::string("container: expected kind ") + kind + ", found " + j.value("kind", "?"));
    }
    return j;
}

template <class F>
auto guarded(F&& f) {
    try {
        return f();
    } catch (const json::exception& e) {
        throw InvalidInput(std::string("container: ") + e.what());
    }
}

json cumulant_json(const CumulantState& s) {
    return {{"ee", std::vector<double>(s.ee.data(), s.ee.data() + s.ee.size())},
            {"pm", matrix_json(s.pm)},
            {"eeee", matrix_json(s.eeee)}};
}

CumulantState cumulant_from(const json& j, std::size_t n) {
    const auto ni = static_cast<Eigen::Index>(n);
    CumulantState s;
    const auto ee = j.at("ee").get<std::vector<double>>();
    if (ee.size() != n) throw InvalidInput("container: ee has the wrong length");
    s.ee = Eigen::Map<const Eigen::VectorXd>(ee.data(), ni);
    s.pm = matrix_from<Eigen::MatrixXcd>(j.at("pm"), ni, ni, "pm");
    s.eeee = matrix_from<Eigen::MatrixXd>(j.at("eeee"), ni, ni, "eeee");
    return s;
}

std::size_t checked_emitters(const json& j, const ParameterBlock& p) {
    const auto n = j.at("shape").at("emitters").get<std::size_t>();
    if (p.positions.size() != n || p.rates.size() != n) {
        throw InvalidInput("container: parameter block disagrees with the emitter count");
    }
    return n;
}

} // namespace

ParameterBlock ParameterBlock::from(const EmitterArray& array, const PumpPattern& pump) {
    if (array.size() != pump.size()) throw InvalidInput("parameter block: array and pump sizes differ");
    return {array.positions(), array.dipole(), array.gamma0(), pump.rates()};
}

std::string to_container(const DensityMatrix& rho, const ParameterBlock& params) {
    json j = header("density_matrix", rho.emitters, params);
    j["shape"]["dim"] = rho.dim();
    j["data"] = matrix_json(rho.data);
    return j.dump();
}

std::string to_container(const CumulantState& state, const ParameterBlock& params) {
    json j = header("cumulant_state", state.size(), params);
    j["data"] = cumulant_json(state);
    return j.dump();
}

std::string to_container(const CorrelationSeries& series, const ParameterBlock& params) {
    if (series.tau.size() != series.values.size()) throw InvalidInput("correlation series: tau and values differ");
    json j = header("correlation_series", series.emitters(), params);
    j["shape"]["tau_points"] = series.tau.size();
    j["tau"] = series.tau;
    j["horizon_warning"] = series.horizon_warning;
    json data = json::array();
    for (const auto& c : series.values) data.push_back(matrix_json(c));
    j["data"] = std::move(data);
    return j.dump();
}

std::string to_container(const CumulantTrajectory& traj, const ParameterBlock& params) {
    if (traj.t.size() != traj.states.size()) throw InvalidInput("trajectory: t and states differ");
    json j = header("cumulant_trajectory", traj.states.empty() ? 0 : traj.states.front().size(), params);
    j["shape"]["t_points"] = traj.t.size();
    j["t"] = traj.t;
    j["steady"] = traj.steady;
    j["final_rhs"] = traj.final_rhs;
    json data = json::array();
    for (const auto& s : traj.states) data.push_back(cumulant_json(s));
    j["data"] = std::move(data);
    return j.dump();
}

Stored<DensityMatrix> density_matrix_from_container(std::string_view text) {
    return guarded([&] {
        const json j = parse(text, "density_matrix");
        auto params = parameters_from(j.at("parameters"));
        const auto n = checked_emitters(j, params);
        const auto dim = static_cast<Eigen::Index>(std::size_t{1} << n);
        if (j.at("shape").at("dim").get<Eigen::Index>() != dim) throw InvalidInput("container: dim is not 2^N");
        DensityMatrix rho;
        rho.emitters = n;
        rho.data = matrix_from<Eigen::MatrixXcd>(j.at("data"), dim, dim, "density matrix");
        return Stored<DensityMatrix>{std::move(rho), std::move(params)};
    });
}

Stored<CumulantState> cumulant_state_from_container(std::string_view text) {
    return guarded([&] {
        const json j = parse(text, "cumulant_state");
        auto params = parameters_from(j.at("parameters"));
        const auto n = checked_emitters(j, params);
        return Stored<CumulantState>{cumulant_from(j.at("data"), n), std::move(params)};
    });
}

Stored<CorrelationSeries> correlation_series_from_container(std::string_view text) {
    return guarded([&] {
        const json j = parse(text, "correlation_series");
        auto params = parameters_from(j.at("parameters"));
        const auto n = static_cast<Eigen::Index>(checked_emitters(j, params));
        CorrelationSeries s;
        s.tau = j.at("tau").get<std::vector<double>>();
        s.horizon_warning = j.at("horizon_warning").get<bool>();
        const auto& data = j.at("data");
        if (j.at("shape").at("tau_points").get<std::size_t>() != s.tau.size() || data.size() != s.tau.size()) {
            throw InvalidInput("container: tau grid disagrees with the data");
        }
        for (const auto& c : data) s.values.push_back(matrix_from<Eigen::MatrixXcd>(c, n, n, "correlation"));
        return Stored<CorrelationSeries>{std::move(s), std::move(params)};
    });
}

Stored<CumulantTrajectory> cumulant_trajectory_from_container(std::string_view text) {
    return guarded([&] {
        const json j = parse(text, "cumulant_trajectory");
        auto params = parameters_from(j.at("parameters"));
        const auto n = checked_emitters(j, params);
        CumulantTrajectory traj;
        traj.t = j.at("t").get<std::vector<double>>();
        traj.steady = j.at("steady").get<bool>();
        traj.final_rhs = j.at("final_rhs").get<double>();
        const auto& data = j.at("data");
        if (j.at("shape").at("t_points").get<std::size_t>() != traj.t.size() || data.size() != traj.t.size()) {
            throw InvalidInput("container: time grid disagrees with the data");
        }
        for (const auto& s : data) traj.states.push_back(cumulant_from(s, n));
        return Stored<CumulantTrajectory>{std::move(traj), std::move(params)};
    });
}

std::string container_kind(std::string_view text) {
    return guarded([&] { return parse(text, nullptr).at("kind").get<std::string>(); });
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InvalidInput("cannot open " + path.string() + " for writing");
    out << text;
    if (!out) throw InvalidInput("failed writing " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidInput("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace superrad
