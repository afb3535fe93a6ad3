#include "dwellflux/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include <json.hpp>

namespace dwell {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double to_number(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw ConfigError("config: '" + key + "' is not a number: " + text);
  }
  if (trim(text.substr(used)).size() != 0 || !std::isfinite(v))
    throw ConfigError("config: '" + key + "' is not a finite number: " + text);
  return v;
}

}  // namespace

RunConfig::RunConfig(std::map<std::string, std::string> values) : values_(std::move(values)) {}

RunConfig RunConfig::parse(const std::string& text) {
  const std::string body = trim(text);
  std::map<std::string, std::string> values;
  if (!body.empty() && body.front() == '{') {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(body);
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string("config: invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config: JSON root must be an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
      const auto& v = it.value();
      if (v.is_number()) {
        values[it.key()] = format_number(v.get<double>());
      } else if (v.is_string()) {
        values[it.key()] = v.get<std::string>();
      } else if (v.is_array()) {
        std::string joined;
        for (const auto& e : v) {
          if (!e.is_number()) throw ConfigError("config: '" + it.key() + "' must hold numbers");
          if (!joined.empty()) joined += ",";
          joined += format_number(e.get<double>());
        }
        values[it.key()] = joined;
      } else {
        throw ConfigError("config: unsupported value for '" + it.key() + "'");
      }
    }
    return RunConfig(std::move(values));
  }
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find_first_of("=:");
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
    values[key] = trim(line.substr(eq + 1));
  }
  return RunConfig(std::move(values));
}

RunConfig RunConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

double RunConfig::number(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("config: missing '" + key + "'");
  return to_number(key, it->second);
}

double RunConfig::number_or(const std::string& key, double fallback) const {
  return has(key) ? number(key) : fallback;
}

int RunConfig::integer_or(const std::string& key, int fallback) const {
  if (!has(key)) return fallback;
  const double v = number(key);
  if (v != std::floor(v) || std::abs(v) > 1e9) throw ConfigError("config: '" + key + "' must be an integer");
  return static_cast<int>(v);
}

std::vector<double> RunConfig::list(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("config: missing '" + key + "'");
  std::vector<double> out;
  std::string item;
  std::istringstream in(it->second);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(to_number(key, item));
  }
  if (out.empty()) throw ConfigError("config: '" + key + "' is empty");
  return out;
}

UnitSystem RunConfig::units() const { return UnitSystem(number_or("hbar", 1.0), number_or("mass", 1.0)); }

Region RunConfig::region() const { return Region(number("x1"), number("x2")); }

GaussCutPacket RunConfig::packet() const { return packet_with_dk(number("dk")); }

GaussCutPacket RunConfig::packet_with_dk(double dk) const {
  return make_gauss_cut_packet_params(number("alpha"), number("k0"), dk, number("x0"), units());
}

std::vector<double> linspace(double lo, double hi, int n) {
  if (n < 1) throw ConfigError("grid: need at least one point");
  if (n == 1) return {lo};
  if (!(hi > lo)) throw ConfigError("grid: require lo < hi");
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) out[i] = lo + (hi - lo) * double(i) / double(n - 1);
  out.back() = hi;
  return out;
}

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& header)
    : out_(path), columns_(header.size()) {
  if (!out_) throw ConfigError("cannot write " + path);
  for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
  out_ << "\n";
}

void CsvWriter::row(const std::vector<double>& values) {
  if (values.size() != columns_) throw std::invalid_argument("CsvWriter: column count mismatch");
  for (std::size_t i = 0; i < values.size(); ++i) out_ << (i ? "," : "") << format_number(values[i]);
  out_ << "\n";
}

}  // namespace dwell
