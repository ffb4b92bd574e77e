#include "ambigate/hash.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "ambigate/errors.hpp"

namespace ambigate {

std::string to_hex(std::uint64_t value) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(value));
    return std::string(buf);
}

std::string file_fingerprint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw GateError("cannot open file for fingerprinting: " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    const std::string bytes = buf.str();
    return to_hex(fnv1a64(bytes));
}

}  // namespace ambigate
