#ifndef LMSCAT_ERRORS_HPP
#define LMSCAT_ERRORS_HPP
//
// lmscat/errors: error hierarchy shared by all modules. The CLI maps these
// onto process exit codes (config 2, accuracy 3, I/O 4).
//

#include <stdexcept>
#include <string>

namespace lmscat {

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// bad parameter values, aperture violations, degenerate geometry
struct InvalidParamError : Error {
    explicit InvalidParamError(const std::string& msg) : Error(msg) {}
};

// config file / dataset schema problems
struct ConfigError : Error {
    explicit ConfigError(const std::string& msg) : Error(msg) {}
};

// quadrature failed to reach its accuracy target, singular systems
struct AccuracyError : Error {
    explicit AccuracyError(const std::string& msg) : Error(msg) {}
};

struct IoError : Error {
    explicit IoError(const std::string& msg) : Error(msg) {}
};

struct FormatError : IoError {
    explicit FormatError(const std::string& msg) : IoError(msg) {}
};

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int config = 2;
inline constexpr int accuracy = 3;
inline constexpr int io = 4;
}  // namespace exit_code

}  // namespace lmscat

#endif  // LMSCAT_ERRORS_HPP
