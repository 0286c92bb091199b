#pragma once

#include <stdexcept>
#include <string>

namespace tumblerpod {

// Precondition violated by a caller (negative depth, zero area, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// A model was asked for something it cannot deliver (no root, no tumbling).
class ModelError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace tumblerpod
