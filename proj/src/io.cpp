#include "eqt/io.hpp"

#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace eqt {

namespace {

using cd = std::complex<double>;

cd complex_from_json(const json& j) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (!j.is_array() || j.size() != 2) throw std::invalid_argument("expected a complex number as [re, im]");
    return {j[0].get<double>(), j[1].get<double>()};
}

json complex_to_json(cd z) { return json::array({z.real(), z.imag()}); }

bool is_complex_entry(const json& j) {
    return j.is_number() || (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number());
}

}  // namespace

json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw std::runtime_error("invalid JSON in " + path.string() + ": " + e.what());
    }
}

void write_json_file(const std::filesystem::path& path, const json& value) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << value.dump(2) << '\n';
}

json spectrum_to_json(const EnergySpectrum& spectrum) {
    return {{"levels", spectrum.levels()}, {"degeneracies", spectrum.degeneracies()}};
}

EnergySpectrum spectrum_from_json(const json& j) {
    if (!j.is_object() || !j.contains("levels")) throw std::invalid_argument("spectrum: missing \"levels\"");
    auto levels = j.at("levels").get<std::vector<double>>();
    std::vector<int> g(levels.size(), 1);
    if (j.contains("degeneracies")) g = j.at("degeneracies").get<std::vector<int>>();
    if (g.size() != levels.size()) throw std::invalid_argument("spectrum: levels and degeneracies differ in length");
    return EnergySpectrum(std::move(levels), std::move(g));
}

json complex_vector_to_json(const Eigen::VectorXcd& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(complex_to_json(v(i)));
    return out;
}

Eigen::VectorXcd complex_vector_from_json(const json& j) {
    if (!j.is_array()) throw std::invalid_argument("expected a list of complex numbers");
    Eigen::VectorXcd v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = complex_from_json(j[i]);
    return v;
}

json complex_matrix_to_json(const Eigen::MatrixXcd& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(complex_to_json(m(i, k)));
        rows.push_back(std::move(row));
    }
    return rows;
}

Eigen::MatrixXcd complex_matrix_from_json(const json& j) {
    if (!j.is_array() || j.empty()) throw std::invalid_argument("expected a non-empty matrix");
    if (is_complex_entry(j[0])) {
        const auto n = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(j.size()))));
        if (static_cast<std::size_t>(n * n) != j.size()) {
            throw std::invalid_argument("flat matrix: entry count is not a perfect square");
        }
        Eigen::MatrixXcd m(n, n);
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index k = 0; k < n; ++k) m(i, k) = complex_from_json(j[static_cast<std::size_t>(i * n + k)]);
        }
        return m;
    }
    const auto rows = static_cast<Eigen::Index>(j.size());
    const auto cols = static_cast<Eigen::Index>(j[0].size());
    Eigen::MatrixXcd m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const json& row = j[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
            throw std::invalid_argument("matrix: ragged rows");
        }
        for (Eigen::Index k = 0; k < cols; ++k) m(i, k) = complex_from_json(row[static_cast<std::size_t>(k)]);
    }
    return m;
}

json state_to_json(const QuantumState& state, const json& spectrum_ref) {
    json out = {{"spectrum", spectrum_ref}};
    switch (state.kind()) {
    case StateKind::pure: out["amplitudes"] = complex_vector_to_json(state.amplitudes()); break;
    case StateKind::diagonal: {
        const auto& p = state.populations();
        out["populations"] = std::vector<double>(p.data(), p.data() + p.size());
        break;
    }
    case StateKind::dense: out["matrix"] = complex_matrix_to_json(state.matrix()); break;
    }
    return out;
}

QuantumState state_from_json(const json& j, const std::filesystem::path& base_dir) {
    if (!j.is_object() || !j.contains("spectrum")) throw std::invalid_argument("state: missing \"spectrum\"");
    const json& ref = j.at("spectrum");
    SpectrumPtr spec;
    if (ref.is_string()) {
        std::filesystem::path p = ref.get<std::string>();
        if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
        spec = share(spectrum_from_json(read_json_file(p)));
    } else {
        spec = share(spectrum_from_json(ref));
    }
    if (j.contains("amplitudes")) return QuantumState::pure(spec, complex_vector_from_json(j.at("amplitudes")));
    if (j.contains("populations")) {
        const auto p = j.at("populations").get<std::vector<double>>();
        return QuantumState::diagonal(spec, Eigen::Map<const Eigen::VectorXd>(p.data(), static_cast<Eigen::Index>(p.size())));
    }
    if (j.contains("matrix")) return QuantumState::dense(spec, complex_matrix_from_json(j.at("matrix")));
    throw std::invalid_argument("state: expected \"amplitudes\", \"populations\" or \"matrix\"");
}

Measurement measurement_from_json(const json& j) {
    if (!j.is_array() || j.empty()) throw std::invalid_argument("measurement: expected a non-empty list of projectors");
    std::vector<Projector> outcomes;
    for (const json& entry : j) {
        if (entry.is_object() && entry.contains("rank_one")) {
            outcomes.push_back(Projector::rank_one(complex_vector_from_json(entry.at("rank_one"))));
        } else {
            outcomes.push_back(Projector::from_matrix(complex_matrix_from_json(entry)));
        }
    }
    return Measurement(std::move(outcomes));
}

json measurement_to_json(const Measurement& m) {
    json out = json::array();
    for (const auto& p : m.outcomes()) {
        if (p.is_rank_one()) {
            out.push_back({{"rank_one", complex_vector_to_json(p.vector())}});
        } else {
            out.push_back(complex_matrix_to_json(p.matrix()));
        }
    }
    return out;
}

json scenario_to_json(const Scenario& scenario) {
    json params = json::object();
    for (const auto& [k, v] : scenario.params) params[k] = v;
    json state = state_to_json(scenario.initial_state, spectrum_to_json(*scenario.spectrum));
    state.erase("spectrum");
    return {{"label", scenario.label},
            {"params", params},
            {"spectrum", spectrum_to_json(*scenario.spectrum)},
            {"state", state}};
}

Scenario scenario_from_json(const json& j, const std::filesystem::path& base_dir) {
    if (!j.is_object() || !j.contains("spectrum") || !j.contains("state")) {
        throw std::invalid_argument("scenario: needs \"spectrum\" and \"state\"");
    }
    json state = j.at("state");
    state["spectrum"] = j.at("spectrum");
    QuantumState s = state_from_json(state, base_dir);
    Scenario out{j.value("label", std::string("scenario")), s.spectrum_ptr(), s, {}};
    if (j.contains("params")) {
        for (const auto& [k, v] : j.at("params").items()) out.params.emplace_back(k, v.get<double>());
    }
    return out;
}

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string config_hash(const json& config) {
    // nlohmann::json objects are key-sorted, so dump() is canonical.
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(config.dump())));
    return buf;
}

}  // namespace eqt
