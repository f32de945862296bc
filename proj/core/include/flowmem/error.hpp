#pragma once

#include <stdexcept>
#include <string>

namespace flowmem {

/// Raised for violated preconditions and malformed data anywhere in the toolkit.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Error from one stage of the end-to-end pipeline; the message is prefixed
/// with the stage label.
class StageError : public Error {
public:
    StageError(std::string stage, const std::string& what)
        : Error("stage '" + stage + "': " + what), stage_(std::move(stage)) {}

    const std::string& stage() const noexcept { return stage_; }

private:
    std::string stage_;
};

}  // namespace flowmem
