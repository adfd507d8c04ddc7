#pragma once

#include <functional>
#include <string>
#include <vector>

namespace xpci::diag {

struct Warning {
  std::string code;
  std::string message;
};

using Sink = std::function<void(const Warning&)>;

/// Report a non-fatal condition (aliasing risk, clamped values, ...).
/// Goes to stderr unless a sink has been installed.
void warn(std::string code, std::string message);

/// Replaces the process-wide sink; returns the previous one.
Sink set_sink(Sink sink);

/// Collects warnings for the lifetime of the object, restoring the previous
/// sink on destruction. Not meant to be nested across threads.
class ScopedCapture {
public:
  ScopedCapture();
  ~ScopedCapture();
  ScopedCapture(const ScopedCapture&) = delete;
  ScopedCapture& operator=(const ScopedCapture&) = delete;

  const std::vector<Warning>& warnings() const { return warnings_; }
  bool contains(const std::string& code) const;

private:
  std::vector<Warning> warnings_;
  Sink previous_;
};

} // namespace xpci::diag
