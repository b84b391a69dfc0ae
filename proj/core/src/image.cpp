#include "relaygs/image.hpp"

#include <algorithm>
#include <cstring>

namespace relaygs {

void clamp01(Image& img) {
    for (double& v : img.data) v = std::clamp(v, 0.0, 1.0);
}

bool bitwise_equal(const Image& a, const Image& b) {
    if (!a.same_shape(b)) return false;
    return std::memcmp(a.data.data(), b.data.data(), a.data.size() * sizeof(double)) == 0;
}

}  // namespace relaygs
