#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "semprobe/kernels.hpp"

namespace semprobe::kernels {

#if !SEMPROBE_HAVE_AVX2
namespace detail {
const KernelTable* avx2_table() { return nullptr; }
}  // namespace detail
#endif

#if !SEMPROBE_HAVE_NEON
namespace detail {
const KernelTable* neon_table() { return nullptr; }
}  // namespace detail
#endif

namespace {

bool cpu_has(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return true;
    case Isa::kAvx2:
#if SEMPROBE_HAVE_AVX2 && (defined(__GNUC__) || defined(__clang__))
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Isa::kNeon:
      // Advanced SIMD is mandatory on AArch64.
      return SEMPROBE_HAVE_NEON != 0;
  }
  return false;
}

Isa best_isa() {
  if (isa_available(Isa::kAvx2)) return Isa::kAvx2;
  if (isa_available(Isa::kNeon)) return Isa::kNeon;
  return Isa::kScalar;
}

Isa initial_isa() {
  if (const char* env = std::getenv("SEMPROBE_ISA")) {
    const std::string v = env;
    Isa wanted = Isa::kScalar;
    if (v == "avx2") {
      wanted = Isa::kAvx2;
    } else if (v == "neon") {
      wanted = Isa::kNeon;
    }
    if (isa_available(wanted)) return wanted;
  }
  return best_isa();
}

struct Selection {
  std::atomic<Isa> isa;
  std::atomic<const KernelTable*> table;
};

Selection& current() {
  static Selection selection{initial_isa(), nullptr};
  static const bool init = [] {
    selection.table.store(&table_for(selection.isa.load()));
    return true;
  }();
  (void)init;
  return selection;
}

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return "scalar";
    case Isa::kAvx2:
      return "avx2";
    case Isa::kNeon:
      return "neon";
  }
  return "unknown";
}

bool isa_available(Isa isa) {
  const KernelTable* table = nullptr;
  switch (isa) {
    case Isa::kScalar:
      table = detail::scalar_table();
      break;
    case Isa::kAvx2:
      table = detail::avx2_table();
      break;
    case Isa::kNeon:
      table = detail::neon_table();
      break;
  }
  return table != nullptr && cpu_has(isa);
}

const KernelTable& table_for(Isa isa) {
  if (!isa_available(isa)) {
    throw std::invalid_argument("kernel ISA '" + std::string(isa_name(isa)) + "' is not available");
  }
  switch (isa) {
    case Isa::kAvx2:
      return *detail::avx2_table();
    case Isa::kNeon:
      return *detail::neon_table();
    case Isa::kScalar:
      break;
  }
  return *detail::scalar_table();
}

Isa active_isa() { return current().isa.load(std::memory_order_relaxed); }

void set_active_isa(Isa isa) {
  const KernelTable& table = table_for(isa);
  current().table.store(&table, std::memory_order_relaxed);
  current().isa.store(isa, std::memory_order_relaxed);
}

const KernelTable& active() { return *current().table.load(std::memory_order_relaxed); }

}  // namespace semprobe::kernels
