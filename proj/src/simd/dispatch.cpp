#include <atomic>
#include <cstdlib>
#include <mutex>

#include "liouville/simd/kernels.hpp"

namespace liouville::simd {

namespace detail {
#if !defined(LIOUVILLE_HAVE_AVX2)
const Kernels* avx2_table() { return nullptr; }
#endif
#if !defined(LIOUVILLE_HAVE_NEON)
const Kernels* neon_table() { return nullptr; }
#endif
}  // namespace detail

namespace {

std::mutex override_mutex;
std::optional<Isa> override_isa;

}  // namespace

std::string_view to_string(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
    case Isa::Neon: return "neon";
  }
  return "scalar";
}

std::optional<Isa> isa_from_string(std::string_view name) {
  if (name == "scalar") return Isa::Scalar;
  if (name == "avx2") return Isa::Avx2;
  if (name == "neon") return Isa::Neon;
  return std::nullopt;
}

bool isa_available(Isa isa) {
  switch (isa) {
    case Isa::Scalar:
      return true;
    case Isa::Avx2:
#if defined(LIOUVILLE_HAVE_AVX2)
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
    case Isa::Neon:
      return detail::neon_table() != nullptr;
  }
  return false;
}

Isa detect_isa() {
  if (isa_available(Isa::Avx2)) return Isa::Avx2;
  if (isa_available(Isa::Neon)) return Isa::Neon;
  return Isa::Scalar;
}

Isa active_isa() {
  {
    std::lock_guard lock(override_mutex);
    if (override_isa) return *override_isa;
  }
  if (const char* env = std::getenv("LIOUVILLE_SIMD")) {
    if (auto isa = isa_from_string(env); isa && isa_available(*isa)) return *isa;
  }
  return detect_isa();
}

void set_isa_override(std::optional<Isa> isa) {
  std::lock_guard lock(override_mutex);
  override_isa = (isa && isa_available(*isa)) ? isa : std::nullopt;
}

const Kernels& kernels(Isa isa) {
  if (isa == Isa::Avx2 && isa_available(Isa::Avx2)) return *detail::avx2_table();
  if (isa == Isa::Neon && isa_available(Isa::Neon)) return *detail::neon_table();
  return detail::scalar_table();
}

const Kernels& kernels() { return kernels(active_isa()); }

}  // namespace liouville::simd
