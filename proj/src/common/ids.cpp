#include "decent/common/ids.hpp"

#include <bit>

namespace decent {

Id160 xor_distance(const Id160& a, const Id160& b) {
    Id160 d;
    for (std::size_t i = 0; i < Id160::size_bytes; ++i) d.bytes[i] = a.bytes[i] ^ b.bytes[i];
    return d;
}

int bucket_index(const Id160& d) {
    for (std::size_t i = 0; i < Id160::size_bytes; ++i) {
        if (d.bytes[i] != 0) {
            int high = 7 - std::countl_zero(d.bytes[i]);
            return static_cast<int>((Id160::size_bytes - 1 - i) * 8) + high;
        }
    }
    return -1;
}

}  // namespace decent
