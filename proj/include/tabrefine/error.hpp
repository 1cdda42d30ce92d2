#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tabrefine {

enum class Errc {
    InvalidGeometry,
    DuplicateTokenId,
    EmptyTokenText,
    InvalidValue,
    DegenerateInput,
    EmptyGrid,
    EmptyText,
    NoLines,
    NoCandidates,
    RaggedMatrix,
    TooLarge,
    EmptyDataset,
    UnsupportedKind,
    ParseError,
    IoError,
};

std::string_view to_string(Errc code) noexcept;

/// Every failure raised by the library carries one of the codes above so
/// callers (and the CLI exit-code mapping) can dispatch without parsing text.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what);

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

}  // namespace tabrefine
