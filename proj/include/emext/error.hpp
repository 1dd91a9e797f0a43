#pragma once

#include <stdexcept>
#include <string>

namespace emext {

/* Exit-code discipline: 1 usage/parse, 2 computation (window insufficiency,
 * unsolvable lift), 3 internal invariant violation (D^2 != 0 etc.). */
struct EmxError : std::runtime_error {
    int exit_code;
    EmxError(int code, const std::string& msg) : std::runtime_error(msg), exit_code(code) {}
};

struct UsageError : EmxError {
    explicit UsageError(const std::string& msg) : EmxError(1, msg) {}
};

struct ParseError : EmxError {
    int line, column;
    ParseError(int ln, int col, const std::string& msg)
        : EmxError(1, "line " + std::to_string(ln) + ", col " + std::to_string(col) + ": " + msg), line(ln), column(col)
    {
    }
};

struct ComputeError : EmxError {
    explicit ComputeError(const std::string& msg) : EmxError(2, msg) {}
};

struct InternalError : EmxError {
    explicit InternalError(const std::string& msg) : EmxError(3, "internal invariant violated: " + msg) {}
};

}  // namespace emext
