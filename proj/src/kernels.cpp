#include "dlufs/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

namespace dlufs::kernels {

namespace {

const Backend* pick_auto() {
    if (const Backend* avx2 = avx2_backend()) return avx2;
    return &scalar_backend();
}

const Backend* initial_backend() {
    if (const char* env = std::getenv("DLUFS_KERNELS")) {
        const std::string_view requested(env);
        if (requested == "scalar") return &scalar_backend();
        if (requested == "avx2" && avx2_backend() != nullptr) return avx2_backend();
        // "auto", empty, or an unsatisfiable request fall through.
    }
    return pick_auto();
}

std::atomic<const Backend*>& active_slot() {
    static std::atomic<const Backend*> slot{initial_backend()};
    return slot;
}

}  // namespace

const Backend& active_backend() { return *active_slot().load(std::memory_order_relaxed); }

bool set_backend(std::string_view name) {
    const Backend* chosen = nullptr;
    if (name == "scalar") {
        chosen = &scalar_backend();
    } else if (name == "avx2") {
        chosen = avx2_backend();
    } else if (name == "auto") {
        chosen = pick_auto();
    }
    if (chosen == nullptr) return false;
    active_slot().store(chosen, std::memory_order_relaxed);
    return true;
}

}  // namespace dlufs::kernels
