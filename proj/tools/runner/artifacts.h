#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "boussctl/exact_control.h"
#include "boussctl/fourier_field.h"
#include "boussctl/nonlinear_flow.h"

namespace boussctl::runner {

inline constexpr const char* kSchemaVersion = "1.0";

std::string sha256_hex(const std::string& data);

// Pretty-printed with a trailing newline; creates parent directories.
void write_json(const std::filesystem::path& path, const nlohmann::json& j);

// k,re,im
void write_field_csv(const std::filesystem::path& path, const FourierField& f);
// t,k,re_u,im_u,re_v,im_v
void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj);
// t,E,xs_norm
void write_energy_csv(const std::filesystem::path& path, const std::vector<double>& t, const std::vector<double>& e,
                      const std::vector<double>& xs);
// t,h_0,...,h_{M-1} with h_j = h(2 pi j / M, t), M = 2N + 1
void write_control_csv(const std::filesystem::path& path, const ControlSignal& h);
// n,re_c1,im_c1,re_c2,im_c2
void write_control_coefficients_csv(const std::filesystem::path& path, const ControlCoefficients& c);

}  // namespace boussctl::runner
