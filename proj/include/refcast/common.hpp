#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>

namespace refcast {

inline constexpr const char* kVersion = "0.1.0";

// Thrown for anything wrong with the data or a request against it
// (bad file, malformed row, impossible parameter). Maps to exit code 2
// in the CLI.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Missing numeric values travel as quiet NaN inside columnar tables.
inline constexpr double missing_value() {
    return std::numeric_limits<double>::quiet_NaN();
}

inline bool is_missing(double v) {
    return std::isnan(v);
}

// Runs body(i) for i in [0, n) on up to `threads` workers. Work items are
// claimed from a shared counter; the caller is responsible for giving each
// item its own output slot so results do not depend on scheduling.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& body);

// Resolves a requested thread count: 0 means "all hardware threads".
int resolve_threads(int requested);

}  // namespace refcast
