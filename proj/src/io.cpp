#include "lanemden/io.hpp"

#include <openssl/evp.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace lanemden::io {

namespace fs = std::filesystem;

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256 failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 15];
  }
  return out;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string field_csv(const LatticeField& u) {
  std::ostringstream os;
  write_field_csv(os, u);
  return os.str();
}

void write_text_file(const fs::path& path, std::string_view content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot write " + tmp.string());
    os.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!os) throw std::runtime_error("write failed: " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::string read_text_file(const fs::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

json point_json(const LatticePoint& x) {
  json j = json::array();
  for (int k = 0; k < x.dim(); ++k) j.push_back(x[k]);
  return j;
}

LatticePoint point_from_json(const json& j) {
  std::vector<int> c = j.get<std::vector<int>>();
  return LatticePoint(std::span<const int>(c));
}

namespace {

json radius_json(double r) { return std::isinf(r) ? json("inf") : json(r); }

double radius_from_json(const json& j) {
  return j.is_string() ? std::numeric_limits<double>::infinity() : j.get<double>();
}

}  // namespace

json table_metadata(const GreenTable& t, const std::string& csv_sha256, const json& config) {
  json rec = json::array();
  for (const auto& [r, v] : t.extrapolation_record) rec.push_back({{"R", radius_json(r)}, {"value", v}});
  return json{{"kind", std::string(to_string(t.kind))},
              {"d", t.dim},
              {"pole", point_json(t.pole)},
              {"R", t.radius},
              {"tol", t.tol},
              {"fitted_constant", t.fitted_constant ? json(*t.fitted_constant) : json(nullptr)},
              {"extrapolation_record", rec},
              {"max_residual", t.max_residual},
              {"sha256", csv_sha256},
              {"config", config}};
}

void save_table(const fs::path& csv_path, const GreenTable& table, const json& config) {
  const auto csv = field_csv(table.values);
  const auto meta = table_metadata(table, sha256_hex(csv), config);
  write_text_file(csv_path, csv);
  auto side = csv_path;
  side += ".json";
  write_text_file(side, meta.dump(2) + "\n");
}

GreenTable load_table(const fs::path& csv_path) {
  auto side = csv_path;
  side += ".json";
  const json meta = json::parse(read_text_file(side));
  const auto csv = read_text_file(csv_path);
  if (sha256_hex(csv) != meta.at("sha256").get<std::string>()) {
    throw std::runtime_error("kernel cache hash mismatch: " + csv_path.string());
  }
  GreenTable t;
  t.kind = parse_domain_kind(meta.at("kind").get<std::string>());
  t.dim = meta.at("d").get<int>();
  t.pole = point_from_json(meta.at("pole"));
  t.radius = meta.at("R").get<double>();
  t.tol = meta.at("tol").get<double>();
  if (!meta.at("fitted_constant").is_null()) t.fitted_constant = meta["fitted_constant"].get<double>();
  for (const auto& e : meta.at("extrapolation_record")) {
    t.extrapolation_record.emplace_back(radius_from_json(e.at("R")), e.at("value").get<double>());
  }
  t.max_residual = meta.at("max_residual").get<double>();
  std::istringstream is(csv);
  t.values = read_field_csv(is, TruncatedDomain::make(t.kind, t.dim, t.radius));
  return t;
}

std::optional<fs::path> cache_dir() {
  const char* env = std::getenv("LANE_EMDEN_CACHE");
  if (!env || !*env) return std::nullopt;
  fs::path p(env);
  fs::create_directories(p);
  return p;
}

}  // namespace lanemden::io
