#include "runner/artifacts.h"

#include <openssl/evp.h>

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace boussctl::runner {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  return os;
}

// Shortest round-trip form is not needed; %.17g is exact and stable across runs.
std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

std::string sha256_hex(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256 failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 0xf];
  }
  return out;
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  auto os = open_out(path);
  os << j.dump(2) << '\n';
}

void write_field_csv(const std::filesystem::path& path, const FourierField& f) {
  auto os = open_out(path);
  os << "k,re,im\n";
  for (int k = -f.max_mode(); k <= f.max_mode(); ++k) os << k << ',' << num(f[k].real()) << ',' << num(f[k].imag()) << '\n';
}

void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj) {
  auto os = open_out(path);
  os << "t,k,re_u,im_u,re_v,im_v\n";
  for (std::size_t i = 0; i < traj.states.size(); ++i) {
    const StateVector& w = traj.states[i];
    for (int k = -w.max_mode(); k <= w.max_mode(); ++k) {
      os << num(traj.times[i]) << ',' << k << ',' << num(w.u[k].real()) << ',' << num(w.u[k].imag()) << ','
         << num(w.v[k].real()) << ',' << num(w.v[k].imag()) << '\n';
    }
  }
}

void write_energy_csv(const std::filesystem::path& path, const std::vector<double>& t, const std::vector<double>& e,
                      const std::vector<double>& xs) {
  auto os = open_out(path);
  os << "t,E,xs_norm\n";
  for (std::size_t i = 0; i < t.size(); ++i) os << num(t[i]) << ',' << num(e[i]) << ',' << num(xs[i]) << '\n';
}

void write_control_csv(const std::filesystem::path& path, const ControlSignal& h) {
  auto os = open_out(path);
  const int m = 2 * h.max_mode + 1;
  os << 't';
  for (int j = 0; j < m; ++j) os << ",h_" << j;
  os << '\n';
  for (std::size_t i = 0; i < h.times.size(); ++i) {
    os << num(h.times[i]);
    for (const cplx& z : to_grid(h.samples[i], m)) os << ',' << num(z.real());
    os << '\n';
  }
}

void write_control_coefficients_csv(const std::filesystem::path& path, const ControlCoefficients& c) {
  auto os = open_out(path);
  os << "n,re_c1,im_c1,re_c2,im_c2\n";
  for (int n = -c.max_mode; n <= c.max_mode; ++n) {
    if (n == 0) continue;
    os << n << ',' << num(c.c(1, n).real()) << ',' << num(c.c(1, n).imag()) << ',' << num(c.c(2, n).real()) << ','
       << num(c.c(2, n).imag()) << '\n';
  }
}

}  // namespace boussctl::runner
