#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tabrefine/model.hpp"

namespace tabrefine {

struct GeneratorSpec {
    std::size_t rows = 5;  // body rows, header excluded
    std::size_t cols = 4;  // 1..7
    double page_width = 1240.0;
    double page_height = 1754.0;
    double jitter = 1.5;   // max token displacement in pixels
};

/// Synthetic invoice page: address and reference lines above the table, a
/// totals block and footer below. The document carries its ground truth and
/// one clean prediction (two near-identical detector candidates plus the GT
/// grid). Deterministic in (seed, spec).
Document generate_document(std::uint64_t seed, const GeneratorSpec& spec = {});

enum class ErrorKind {
    noise_below,
    wrong_table,
    missing_elements,
    noise_above,
    false_positive,
    wrong_header,
    segmentation_error,
    fused_lines,
    splitted_line,
};

inline constexpr std::size_t kErrorKindCount = 9;
std::string_view to_string(ErrorKind kind) noexcept;
ErrorKind error_kind_from_string(std::string_view name);
const std::vector<ErrorKind>& all_error_kinds();

/// What the corruption changed, relative to the ground truth.
struct GtDelta {
    ErrorKind kind;
    std::optional<BBox> noise_region;  // content wrongly included or chosen
    std::optional<std::size_t> row;    // affected grid row
    std::optional<std::size_t> column; // affected grid column
    std::size_t lines = 0;             // lines swallowed
};

struct DegradedPrediction {
    std::vector<CandidateTable> candidates;
    TableGrid grid;
    GtDelta delta;
};

/// Corrupts the prediction record of a document that has ground truth.
/// Throws Error(UnsupportedKind) when the document is too small for the kind,
/// Error(InvalidValue) when it carries no ground truth.
DegradedPrediction inject_error(const Document& doc, ErrorKind kind, std::uint64_t seed);

/// The document with its prediction replaced by the degraded one.
Document apply(const Document& doc, const DegradedPrediction& degraded);

struct CorpusItem {
    std::string id;
    Document doc;
    std::optional<ErrorKind> kind;  // none for clean documents
    std::uint64_t seed = 0;
};

enum class CorpusMix {
    clean,       // no corruption
    stratified,  // kinds cycled in order, equal shares
    business,    // kinds drawn with the business-invoice error frequencies
};

/// Default business frequencies (percent) by kind; splitted_line is absent.
const std::vector<std::pair<ErrorKind, double>>& business_frequencies();

struct CorpusSpec {
    std::size_t documents = 200;
    CorpusMix mix = CorpusMix::stratified;
    std::size_t min_rows = 2, max_rows = 12;
    std::size_t min_cols = 2, max_cols = 7;
};

/// Deterministic in (seed, spec). Documents are generated in parallel.
std::vector<CorpusItem> make_corpus(std::uint64_t seed, const CorpusSpec& spec);

}  // namespace tabrefine
