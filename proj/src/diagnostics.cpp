#include "xpci/diagnostics.hpp"

#include <algorithm>
#include <iostream>
#include <mutex>

namespace xpci::diag {
namespace {

std::mutex& sink_mutex() {
  static std::mutex m;
  return m;
}

Sink& current_sink() {
  static Sink sink = [](const Warning& w) {
    std::cerr << "warning [" << w.code << "]: " << w.message << '\n';
  };
  return sink;
}

} // namespace

void warn(std::string code, std::string message) {
  std::lock_guard lock(sink_mutex());
  current_sink()(Warning{std::move(code), std::move(message)});
}

Sink set_sink(Sink sink) {
  std::lock_guard lock(sink_mutex());
  std::swap(current_sink(), sink);
  return sink;
}

ScopedCapture::ScopedCapture() {
  previous_ = set_sink([this](const Warning& w) { warnings_.push_back(w); });
}

ScopedCapture::~ScopedCapture() { set_sink(std::move(previous_)); }

bool ScopedCapture::contains(const std::string& code) const {
  return std::any_of(warnings_.begin(), warnings_.end(),
                     [&](const Warning& w) { return w.code == code; });
}

} // namespace xpci::diag
