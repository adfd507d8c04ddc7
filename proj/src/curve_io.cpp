#include "xpci/curve_io.hpp"

#include "xpci/errors.hpp"
#include "xpci/raster_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace xpci::io {

namespace {

bool parse_double(const std::string& tok, double& out) {
  const char* b = tok.data();
  const char* e = b + tok.size();
  auto [p, ec] = std::from_chars(b, e, out);
  return ec == std::errc() && p == e;
}

} // namespace

TwoColumn read_two_column(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string());
  TwoColumn data;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    std::string a, b, extra;
    if (!(ss >> a)) continue;
    double x = 0.0, y = 0.0;
    if (!(ss >> b) || (ss >> extra) || !parse_double(a, x) || !parse_double(b, y))
      throw FormatError(path.string() + ":" + std::to_string(lineno) +
                            ": expected two numeric columns");
    data.x.push_back(x);
    data.y.push_back(y);
  }
  return data;
}

void write_two_column(const std::filesystem::path& path, const TwoColumn& data,
                      const std::string& comment) {
  if (data.x.size() != data.y.size()) throw ValidationError("column lengths differ");
  std::string text;
  if (!comment.empty()) {
    std::istringstream ss(comment);
    for (std::string l; std::getline(ss, l);) text += "# " + l + "\n";
  }
  char buf[64];
  for (std::size_t i = 0; i < data.x.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g\n", data.x[i], data.y[i]);
    text += buf;
  }
  write_text_atomic(path, text);
}

RockingCurve read_rocking_curve(const std::filesystem::path& path) {
  TwoColumn c = read_two_column(path);
  return RockingCurve(std::move(c.x), std::move(c.y));
}

void write_rocking_curve(const std::filesystem::path& path, const RockingCurve& curve) {
  write_two_column(path, {curve.theta(), curve.t()}, "theta_rad transmission");
}

AngularProfile read_profile(const std::filesystem::path& path) {
  TwoColumn c = read_two_column(path);
  if (c.x.size() < 2) throw ValidationError(path.string() + ": need at least 2 samples");
  const double step = (c.x.back() - c.x.front()) / static_cast<double>(c.x.size() - 1);
  for (std::size_t i = 1; i < c.x.size(); ++i)
    if (std::abs((c.x[i] - c.x[i - 1]) - step) > 1e-9 * std::abs(step))
      throw ValidationError(path.string() + ": angles are not uniformly sampled");
  AngularProfile p{c.x.front(), step, std::move(c.y)};
  p.validate();
  return p;
}

void write_profile(const std::filesystem::path& path, const AngularProfile& profile,
                   const std::string& comment) {
  TwoColumn c;
  for (std::size_t i = 0; i < profile.values.size(); ++i) c.x.push_back(profile.theta(i));
  c.y = profile.values;
  write_two_column(path, c, comment);
}

} // namespace xpci::io
