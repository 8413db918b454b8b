// JSON formats for spectra, Hermitian matrices, states, measurements
// and scenarios.
//
//   spectrum     {"levels": [...], "degeneracies": [...]}
//   complex      [re, im]
//   matrix       list of rows of complex entries (a flat row-major list of d*d entries is also accepted)
//   state        {"spectrum": <path or spectrum object>, "amplitudes": [...]}
//                | {..., "matrix": <matrix>} | {..., "populations": [...]}
//   measurement  [<matrix> | {"rank_one": [amplitudes]}, ...]
//   scenario     {"label": s, "params": {...}, "spectrum": {...}, "state": {...}}

#pragma once

#include "eqt/constructions.hpp"
#include "eqt/measure.hpp"
#include "eqt/spectra.hpp"
#include "eqt/states.hpp"

#include <json.hpp>

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <string>

namespace eqt {

using json = nlohmann::json;

json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const json& value);

json spectrum_to_json(const EnergySpectrum& spectrum);
EnergySpectrum spectrum_from_json(const json& j);

json complex_vector_to_json(const Eigen::VectorXcd& v);
Eigen::VectorXcd complex_vector_from_json(const json& j);
json complex_matrix_to_json(const Eigen::MatrixXcd& m);
Eigen::MatrixXcd complex_matrix_from_json(const json& j);

/// Relative spectrum paths inside a state file resolve against base_dir.
json state_to_json(const QuantumState& state, const json& spectrum_ref);
QuantumState state_from_json(const json& j, const std::filesystem::path& base_dir = {});

Measurement measurement_from_json(const json& j);
json measurement_to_json(const Measurement& m);

json scenario_to_json(const Scenario& scenario);
Scenario scenario_from_json(const json& j, const std::filesystem::path& base_dir = {});

/// 64-bit FNV-1a of the bytes.
std::uint64_t fnv1a64(const std::string& bytes);
/// 16 hex digits of the FNV-1a hash of the compact, key-sorted dump.
std::string config_hash(const json& config);

}  // namespace eqt
