#include "rmtlab/rng.hpp"

namespace rmt {

std::uint64_t derive(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  std::uint64_t h = mix64(seed ^ 0x6a09e667f3bcc909ULL);
  h = mix64(h ^ (a + 0x9e3779b97f4a7c15ULL));
  h = mix64(h ^ (b + 0xbb67ae8584caa73bULL));
  return h;
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t derive(std::uint64_t master, std::string_view tag, std::uint64_t index) {
  return derive(master, fnv1a(tag), index);
}

}  // namespace rmt
