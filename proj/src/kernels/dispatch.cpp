#include "soccersum/kernels/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace soccersum::kernels {
namespace {

std::atomic<const KernelTable*> g_active{nullptr};

bool cpu_has_avx2() {
#if defined(SOCCERSUM_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

const KernelTable* select_default() {
    if (const char* env = std::getenv("SOCCERSUM_SIMD")) {
        std::string want(env);
        if (want == "scalar") return &scalar_table();
        if (want == "avx2" && isa_available(Isa::avx2)) return &table_for(Isa::avx2);
        if (want == "neon" && isa_available(Isa::neon)) return &table_for(Isa::neon);
    }
    if (isa_available(Isa::avx2)) return &table_for(Isa::avx2);
    if (isa_available(Isa::neon)) return &table_for(Isa::neon);
    return &scalar_table();
}

}  // namespace

bool isa_available(Isa isa) {
    switch (isa) {
        case Isa::scalar: return true;
        case Isa::avx2: return cpu_has_avx2();
        case Isa::neon:
#if defined(SOCCERSUM_HAVE_NEON)
            return true;
#else
            return false;
#endif
    }
    return false;
}

const KernelTable& table_for(Isa isa) {
    if (!isa_available(isa)) throw std::invalid_argument("kernel variant not available on this CPU/build");
    switch (isa) {
        case Isa::scalar: return scalar_table();
#if defined(SOCCERSUM_HAVE_AVX2)
        case Isa::avx2: return avx2_table();
#endif
#if defined(SOCCERSUM_HAVE_NEON)
        case Isa::neon: return neon_table();
#endif
        default: break;
    }
    throw std::invalid_argument("kernel variant not compiled in");
}

const KernelTable& active() {
    const KernelTable* t = g_active.load(std::memory_order_acquire);
    if (t == nullptr) {
        const KernelTable* chosen = select_default();
        const KernelTable* expected = nullptr;
        g_active.compare_exchange_strong(expected, chosen, std::memory_order_acq_rel);
        t = g_active.load(std::memory_order_acquire);
    }
    return *t;
}

void force(Isa isa) { g_active.store(&table_for(isa), std::memory_order_release); }

}  // namespace soccersum::kernels
