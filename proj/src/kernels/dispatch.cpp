#include "kernels_impl.hpp"

#include <cstdlib>
#include <string_view>

namespace xpci::kernels {
namespace {

bool cpu_has_avx2() {
#if defined(XPCI_BUILD_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

const Table& select() {
  if (const char* env = std::getenv("XPCI_KERNELS"); env && std::string_view(env) == "scalar")
    return scalar();
  if (const Table* t = avx2()) return *t;
  return scalar();
}

} // namespace

const Table& scalar() { return detail::scalar_table; }

const Table* avx2() {
#if defined(XPCI_BUILD_AVX2)
  static const bool supported = cpu_has_avx2();
  return supported ? &detail::avx2_table : nullptr;
#else
  return nullptr;
#endif
}

const Table& active() {
  static const Table& table = select();
  return table;
}

} // namespace xpci::kernels
