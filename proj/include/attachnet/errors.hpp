#pragma once

#include <stdexcept>
#include <string>

namespace attachnet {

/// Raw input has no recognizable header/body structure.
struct UnparseableMessage : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct UnparseableDate : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Statistics requested on a network with no nodes.
struct EmptyNetwork : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Power iteration did not settle within the iteration budget.
struct ConvergenceFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A query named a user that has no bag.
struct UnknownUser : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace attachnet
