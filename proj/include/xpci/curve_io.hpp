#pragma once

// Two-column text curves: "θ_rad value" per line, '#' starts a comment.

#include "xpci/gradient.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace xpci::io {

struct TwoColumn {
  std::vector<double> x;
  std::vector<double> y;
};

TwoColumn read_two_column(const std::filesystem::path& path);
/// Values are printed with 17 significant digits, so reading back is exact.
void write_two_column(const std::filesystem::path& path, const TwoColumn& data,
                      const std::string& comment = {});

RockingCurve read_rocking_curve(const std::filesystem::path& path);
void write_rocking_curve(const std::filesystem::path& path, const RockingCurve& curve);
AngularProfile read_profile(const std::filesystem::path& path);
void write_profile(const std::filesystem::path& path, const AngularProfile& profile,
                   const std::string& comment = {});

} // namespace xpci::io
