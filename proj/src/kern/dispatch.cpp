#include <cstdlib>
#include <cstring>
#include <stdexcept>

#include "adaptdiff/kern/kernels.hpp"

namespace adaptdiff::kern {

const Ops& scalar_table();  // scalar.cpp
const Ops& avx2_table();    // avx2.cpp

bool avx2_supported() {
#if defined(__x86_64__) || defined(__i386__)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

const Ops& table(Isa isa) { return isa == Isa::avx2 ? avx2_table() : scalar_table(); }

const char* isa_name(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

namespace {

Isa select_isa() {
    if (const char* env = std::getenv("ADAPTDIFF_SIMD")) {
        if (std::strcmp(env, "scalar") == 0) return Isa::scalar;
        if (std::strcmp(env, "avx2") == 0) {
            if (!avx2_supported())
                throw std::runtime_error("ADAPTDIFF_SIMD=avx2 but the CPU lacks AVX2/FMA");
            return Isa::avx2;
        }
        if (std::strcmp(env, "auto") != 0)
            throw std::runtime_error(std::string("ADAPTDIFF_SIMD: unknown value '") + env +
                                     "' (expected scalar|avx2|auto)");
    }
    return avx2_supported() ? Isa::avx2 : Isa::scalar;
}

}  // namespace

Isa active_isa() {
    static const Isa isa = select_isa();
    return isa;
}

const Ops& ops() { return table(active_isa()); }

}  // namespace adaptdiff::kern
