#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace ambigate {

// FNV-1a, 64-bit. Used for deterministic stub scoring and content fingerprints.
constexpr std::uint64_t fnv1a64(std::string_view data) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

// splitmix64 finalizer; decorrelates related inputs.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

std::string to_hex(std::uint64_t value);

// Fingerprint of a file's raw bytes, as a 16-char hex string.
std::string file_fingerprint(const std::filesystem::path& path);

}  // namespace ambigate
