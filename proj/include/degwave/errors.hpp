#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace degwave {

/// Raised when a parameter violates a documented invariant.
/// `key` names the offending config key or argument.
class ValidationError : public std::runtime_error {
public:
    ValidationError(std::string key, const std::string& message)
        : std::runtime_error(key + ": " + message), key_(std::move(key)) {}

    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

/// Raised when the explicit time stepper detects runaway energy growth.
class InstabilityError : public std::runtime_error {
public:
    explicit InstabilityError(const std::string& message)
        : std::runtime_error(message) {}
};

/// Raised when the control iteration exhausts its iteration budget.
/// Carries the relative residual history observed before giving up.
class NonConvergenceError : public std::runtime_error {
public:
    NonConvergenceError(const std::string& message, std::vector<double> history)
        : std::runtime_error(message), residual_history_(std::move(history)) {}

    const std::vector<double>& residual_history() const noexcept {
        return residual_history_;
    }

private:
    std::vector<double> residual_history_;
};

}  // namespace degwave
