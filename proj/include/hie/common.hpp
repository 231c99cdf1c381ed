#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace hie {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Raised for contract violations anywhere in the library (bad shapes,
/// mismatched models, malformed input files, ...).
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Non-fatal diagnostics go through here so callers and tests can silence
/// or capture them.
void warn(const std::string& message);

/// Replace the warning sink. Passing an empty function restores stderr output.
void set_warning_handler(void (*handler)(const std::string&));

}  // namespace hie
