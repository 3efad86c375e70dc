#pragma once

#include <stdexcept>
#include <string>

namespace specshift {

// Error taxonomy mirrored by the CLI exit codes:
//   validation_error  -> 2   (bad input / unusable configuration)
//   precision_error   -> 3   (exact enclosures too wide; more data would fix it)
//   consistency_error -> 4   (an internal invariant failed; the data is wrong)

struct validation_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct precision_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct consistency_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace specshift
