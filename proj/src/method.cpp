#include "saabench/method.hpp"

#include "saabench/errors.hpp"

namespace saabench {

std::string to_string(MethodKind kind) {
    switch (kind) {
        case MethodKind::Saa: return "saa";
        case MethodKind::Bagging: return "bagging";
        case MethodKind::Kernel: return "kernel";
        case MethodKind::Mle: return "mle";
        case MethodKind::Bayes: return "bayes";
    }
    return "unknown";
}

MethodKind method_from_string(const std::string& name) {
    if (name == "saa") return MethodKind::Saa;
    if (name == "bagging") return MethodKind::Bagging;
    if (name == "kernel") return MethodKind::Kernel;
    if (name == "mle") return MethodKind::Mle;
    if (name == "bayes") return MethodKind::Bayes;
    throw InvalidArgumentError("unknown method '" + name + "' (expected saa, bagging, kernel, mle or bayes)");
}

}  // namespace saabench
