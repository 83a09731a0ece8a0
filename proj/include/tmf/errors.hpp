#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tmf {

/// An indicator was queried inside its warmup window.
class NotReadyError : public std::runtime_error {
public:
    NotReadyError(std::string indicator, std::size_t index)
        : std::runtime_error(indicator + " is not ready at index " + std::to_string(index)),
          indicator_(std::move(indicator)) {}
    const std::string& indicator() const { return indicator_; }

private:
    std::string indicator_;
};

/// A user-history update arrived with a timestamp older than the last one applied.
class OrderingError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A feature block demanded by the feature set was not supplied.
class AssemblyError : public std::runtime_error {
public:
    explicit AssemblyError(std::string block)
        : std::runtime_error("missing feature block: " + block), block_(std::move(block)) {}
    const std::string& block() const { return block_; }

private:
    std::string block_;
};

/// Training produced a non-finite loss.
class DivergedError : public std::runtime_error {
public:
    explicit DivergedError(int epoch)
        : std::runtime_error("training diverged (non-finite loss) at epoch " + std::to_string(epoch)),
          epoch_(epoch) {}
    int epoch() const { return epoch_; }

private:
    int epoch_;
};

/// Malformed input file content. `line` is 1-based, 0 when not line-oriented.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t line)
        : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

} // namespace tmf
