#pragma once

#include <stdexcept>
#include <string>

namespace treecol {

// Thrown when an exact routine would exceed a configured resource cap
// (state-space size, all-pairs path budget, enumeration budget). The CLI
// maps this to exit code 1.
class CapExceeded : public std::runtime_error {
public:
    explicit CapExceeded(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace treecol
