#pragma once

#include <stdexcept>
#include <string>

namespace ddk {

// A statistical routine was handed data it cannot work with (degenerate tail,
// empty sample, inconsistent configs). Maps to CLI exit code 1.
class AnalysisError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Missing files, unreadable input, bad flags. Maps to CLI exit code 2.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace ddk
