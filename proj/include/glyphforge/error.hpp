#pragma once

#include <stdexcept>
#include <string>

namespace glyphforge {

enum class ErrorKind {
    invalid_argument,
    font_rejected,
    empty_corpus,
    format,
    graph,
    usage,
    sampling,
    configuration,
    training_divergence,
    io,
};

const char* to_string(ErrorKind k);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& msg);
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& msg);

// Format errors carry the byte offset of the first bad byte.
[[noreturn]] void fail_format(std::size_t offset, const std::string& msg);

} // namespace glyphforge
