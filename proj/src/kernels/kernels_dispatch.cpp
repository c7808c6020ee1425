#include "msd/kernels.hpp"

#include <cstdlib>

namespace msd::kernels {

#if defined(MSD_HAVE_AVX2_TU)
const Backend* avx2_backend();
#endif
#if defined(MSD_HAVE_NEON_TU)
const Backend* neon_backend();
#endif

namespace {

const Backend* select() {
    if (const char* forced = std::getenv("MSD_KERNEL_BACKEND")) {
        if (const Backend* b = by_name(forced)) return b;
        // Unknown or unavailable name: fall through to auto-detection rather
        // than failing inside a static initializer.
    }
#if defined(MSD_HAVE_AVX2_TU)
    if (__builtin_cpu_supports("avx2")) return avx2_backend();
#endif
#if defined(MSD_HAVE_NEON_TU)
    // NEON is architecturally guaranteed on arm64.
    return neon_backend();
#endif
    return &scalar();
}

}  // namespace

const Backend* by_name(const std::string& name) {
    if (name == "scalar") return &scalar();
#if defined(MSD_HAVE_AVX2_TU)
    if (name == "avx2" && __builtin_cpu_supports("avx2")) return avx2_backend();
#endif
#if defined(MSD_HAVE_NEON_TU)
    if (name == "neon") return neon_backend();
#endif
    return nullptr;
}

const Backend& active() {
    static const Backend* chosen = select();
    return *chosen;
}

}  // namespace msd::kernels
