#include <atomic>
#include <cstdlib>

#include "hyperlens/kernels.hpp"

namespace hyperlens::kernels {
namespace {

// -1: automatic, otherwise a Backend value.
std::atomic<int> g_forced{-1};

bool cpu_has_avx2() noexcept {
#if defined(HYPERLENS_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  static const bool has = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return has;
#else
  return false;
#endif
}

Backend automatic_backend() noexcept {
  static const Backend chosen = [] {
    if (const char* env = std::getenv("HYPERLENS_SIMD")) {
      if (auto b = parse_backend(env); b && backend_available(*b)) return *b;
    }
    return cpu_has_avx2() ? Backend::Avx2 : Backend::Scalar;
  }();
  return chosen;
}

}  // namespace

std::string_view to_string(Backend b) noexcept {
  switch (b) {
    case Backend::Scalar: return "scalar";
    case Backend::Avx2: return "avx2";
  }
  return "unknown";
}

std::optional<Backend> parse_backend(std::string_view name) noexcept {
  if (name == "scalar") return Backend::Scalar;
  if (name == "avx2") return Backend::Avx2;
  return std::nullopt;
}

bool backend_available(Backend b) noexcept {
  return b == Backend::Scalar || cpu_has_avx2();
}

const KernelTable& table(Backend b) noexcept {
#if defined(HYPERLENS_HAVE_AVX2)
  if (b == Backend::Avx2 && cpu_has_avx2()) return detail::kAvx2Table;
#endif
  (void)b;
  return detail::kScalarTable;
}

Backend active_backend() noexcept {
  const int forced = g_forced.load(std::memory_order_relaxed);
  if (forced >= 0 && backend_available(static_cast<Backend>(forced))) {
    return static_cast<Backend>(forced);
  }
  return automatic_backend();
}

const KernelTable& active() noexcept { return table(active_backend()); }

void force_backend(std::optional<Backend> b) noexcept {
  g_forced.store(b ? static_cast<int>(*b) : -1, std::memory_order_relaxed);
}

}  // namespace hyperlens::kernels
