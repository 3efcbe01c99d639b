#include "parallel.hpp"

#include <algorithm>
#include <cstdlib>

namespace hypersr {

int resolve_workers() {
    if (const char* env = std::getenv("HYPERSR_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0') {
            return static_cast<int>(std::clamp(v, 1L, 256L));
        }
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(std::min(hw, 256u));
}

}  // namespace hypersr
