#pragma once

#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "dwellflux/core.hpp"

namespace dwell {

// Flat key = value configuration ('#' starts a comment); a file whose first
// non-blank character is '{' is read as a flat JSON object instead.
class RunConfig {
 public:
  RunConfig() = default;
  explicit RunConfig(std::map<std::string, std::string> values);

  static RunConfig parse(const std::string& text);
  static RunConfig load(const std::string& path);

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  // Throws ConfigError when missing or not a finite number.
  double number(const std::string& key) const;
  double number_or(const std::string& key, double fallback) const;
  int integer_or(const std::string& key, int fallback) const;
  std::vector<double> list(const std::string& key) const;
  void set(const std::string& key, const std::string& value) { values_[key] = value; }

  // ħ and m default to 1; every other physical parameter is mandatory.
  UnitSystem units() const;
  Region region() const;
  GaussCutPacket packet() const;
  GaussCutPacket packet_with_dk(double dk) const;

 private:
  std::map<std::string, std::string> values_;
};

std::vector<double> linspace(double lo, double hi, int n);

// CSV with a header row; numbers printed with 17 significant digits.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header);
  void row(const std::vector<double>& values);

 private:
  std::ofstream out_;
  std::size_t columns_;
};

std::string format_number(double v);

}  // namespace dwell
