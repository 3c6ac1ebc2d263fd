#include "quenchxy/error.hpp"

namespace quenchxy {

const char* to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Size: return "size";
        case ErrorKind::Topology: return "topology";
        case ErrorKind::Partition: return "partition";
        case ErrorKind::UnsupportedDimension: return "unsupported-dimension";
        case ErrorKind::Coverage: return "coverage";
        case ErrorKind::DegenerateInput: return "degenerate-input";
        case ErrorKind::Shape: return "shape";
        case ErrorKind::Domain: return "domain";
        case ErrorKind::Range: return "range";
        case ErrorKind::Precision: return "precision";
        case ErrorKind::Numeric: return "numeric";
        case ErrorKind::Unsupported: return "unsupported";
        case ErrorKind::Data: return "data";
        case ErrorKind::Parse: return "parse";
        case ErrorKind::Io: return "io";
    }
    return "unknown";
}

}  // namespace quenchxy
