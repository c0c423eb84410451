#pragma once

#include <stdexcept>
#include <string>

namespace ulil {

// Error categories mirror the process exit codes of the CLI:
// 2 = bad input / configuration, 3 = numerical failure.
enum class ErrorCode { bad_argument = 2, numeric_failure = 3 };

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}
    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void throw_bad_argument(const std::string& what) {
    throw Error(ErrorCode::bad_argument, what);
}

[[noreturn]] inline void throw_numeric(const std::string& what) {
    throw Error(ErrorCode::numeric_failure, what);
}

}  // namespace ulil
