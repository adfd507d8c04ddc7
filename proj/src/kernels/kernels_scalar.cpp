#include "kernels_impl.hpp"

#include <cassert>

namespace xpci::kernels::detail {
namespace {

void multiply(std::span<cplx> data, std::span<const cplx> filter) {
  assert(data.size() == filter.size());
  multiply_range(data.data(), filter.data(), 0, data.size());
}

void multiply_real(std::span<cplx> data, std::span<const double> factor) {
  assert(data.size() == factor.size());
  multiply_real_range(data.data(), factor.data(), 0, data.size());
}

void scale(std::span<cplx> data, double s) { scale_range(data.data(), s, 0, data.size()); }

void norm_sq(std::span<const cplx> data, std::span<double> out) {
  assert(data.size() == out.size());
  norm_sq_range(data.data(), out.data(), 0, data.size());
}

void accumulate_norm_sq(std::span<const cplx> data, double weight, std::span<double> acc) {
  assert(data.size() == acc.size());
  accumulate_norm_sq_range(data.data(), weight, acc.data(), 0, data.size());
}

void accumulate_conj_product(std::span<const cplx> filter, std::span<const cplx> data,
                             std::span<cplx> acc) {
  assert(data.size() == filter.size() && data.size() == acc.size());
  accumulate_conj_product_range(filter.data(), data.data(), acc.data(), 0, data.size());
}

} // namespace

const Table scalar_table{"scalar",  multiply,           multiply_real,          scale,
                         norm_sq,   accumulate_norm_sq, accumulate_conj_product};

} // namespace xpci::kernels::detail
