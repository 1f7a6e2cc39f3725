#pragma once

#include <stdexcept>
#include <string>

namespace hwv {

// Thrown when an argument violates an operation's documented precondition.
class PreconditionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A linear system too close to singular to be solved reliably.
class IllConditionedError : public std::runtime_error {
public:
    IllConditionedError(const std::string& what, double condition)
        : std::runtime_error(what), condition_(condition) {}
    double condition() const noexcept { return condition_; }

private:
    double condition_;
};

inline void require(bool ok, const std::string& message)
{
    if (!ok) throw PreconditionError(message);
}

} // namespace hwv
