#include "glyphforge/error.hpp"

namespace glyphforge {

const char* to_string(ErrorKind k) {
    switch (k) {
    case ErrorKind::invalid_argument: return "invalid-argument";
    case ErrorKind::font_rejected: return "font-rejected";
    case ErrorKind::empty_corpus: return "empty-corpus";
    case ErrorKind::format: return "format";
    case ErrorKind::graph: return "graph";
    case ErrorKind::usage: return "usage";
    case ErrorKind::sampling: return "sampling";
    case ErrorKind::configuration: return "configuration";
    case ErrorKind::training_divergence: return "training-divergence";
    case ErrorKind::io: return "io";
    }
    return "unknown";
}

Error::Error(ErrorKind kind, const std::string& msg)
    : std::runtime_error(std::string(to_string(kind)) + ": " + msg), kind_(kind) {}

void fail(ErrorKind kind, const std::string& msg) { throw Error(kind, msg); }

void fail_format(std::size_t offset, const std::string& msg) {
    throw Error(ErrorKind::format, msg + " (at byte offset " + std::to_string(offset) + ")");
}

} // namespace glyphforge
