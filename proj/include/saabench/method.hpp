#pragma once

#include <string>

namespace saabench {

/// The five decision procedures compared against SAA.
enum class MethodKind { Saa, Bagging, Kernel, Mle, Bayes };

/// Lower-case identifier used in configs and CSV output ("saa", "bagging", ...).
std::string to_string(MethodKind kind);

/// Inverse of to_string; throws InvalidArgumentError for unknown names.
MethodKind method_from_string(const std::string& name);

}  // namespace saabench
