#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "kppfront/front.hpp"
#include "kppfront/wavespeed.hpp"

namespace kppfront {

std::string format_double(double v);  // %.12e
std::uint64_t fnv1a64(const std::string& data);

// comma separated, header row, LF endings
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

// closed polyline of c*(theta) with axis rings; N = 2 sweeps only
void write_polar_svg(const std::string& path, const SweepTable& table);

class Manifest {
public:
  void add(const std::string& key, const std::string& value) { entries_.emplace_back(key, value); }
  void add(const std::string& key, double value) { add(key, format_double(value)); }
  void add_count(const std::string& key, std::size_t value) { add(key, std::to_string(value)); }
  void write(const std::string& path) const;
  const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }

private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

// profile.csv (xi, t, y..., phi over the whole strip grid), profile_mean.csv and
// profile.meta with what is needed to reload the grid
void write_profile(const std::string& dir, const FrontProfile& profile);
FrontProfile read_profile(const std::string& dir, const MediumSpec& spec, const StripTolerances& tols);

void write_certificates(const std::string& path, const FrontProfile& profile, const StripTolerances& tols);

}  // namespace kppfront
