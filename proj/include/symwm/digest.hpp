#ifndef SYMWM_DIGEST_HPP
#define SYMWM_DIGEST_HPP

#include <cstdint>
#include <string>
#include <string_view>

namespace symwm {
std::string sha256_hex(std::string_view data);
std::uint64_t fnv1a64(std::string_view data);
std::uint64_t mix64(std::uint64_t x);

// Stateless draw in [0, 1) determined entirely by its three keys.
double counter_uniform(std::uint64_t seed, std::uint64_t a, std::uint64_t b);
}

#endif
