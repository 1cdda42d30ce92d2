#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tabrefine/model.hpp"

namespace tabrefine {

/// Longest common subsequence length over bytes.
std::size_t lcs_length(std::string_view a, std::string_view b);

/// 2·LCS / (|a|+|b|); two empty cells are identical, one empty cell matches nothing.
double cell_similarity(std::string_view a, std::string_view b);

struct GritsScore {
    double score = 0.0;  // summed similarity over aligned cells
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

/// Content similarity of two tables under an order-preserving sub-grid
/// alignment. Columns are aligned first (column similarity is itself a
/// sequence alignment of the column's cells), then rows over the aligned
/// columns. Throws Error(RaggedMatrix).
GritsScore grits_con(const CellMatrix& gt, const CellMatrix& pred);

/// Exact maximum over every pair of equal-length row subsequences and
/// column subsequences. Throws Error(TooLarge) past 4 rows or columns.
GritsScore grits_con_bruteforce(const CellMatrix& gt, const CellMatrix& pred);

struct PurityCompleteness {
    bool pure = false;
    bool complete = false;
};

/// Elements are the tokens whose centers fall in a box.
PurityCompleteness purity_completeness(const BBox& pred, const BBox& gt, std::span<const Token> tokens);

struct DocumentEval {
    std::string id;
    std::optional<std::string> error;  // set when the document failed to process
    bool pure = false;
    bool complete = false;
    double giou = -1.0;
    GritsScore grits;
};

struct MeanCi {
    double mean = 0.0;
    double ci95 = 0.0;  // 1.96 × standard error
};

MeanCi mean_ci95(std::span<const double> values);

struct TdReport {
    double purity_pct = 0.0;
    double completeness_pct = 0.0;
    double mean_giou_pct = 0.0;
    double ci95_giou = 0.0;
    std::vector<DocumentEval> per_document;
};

struct TsrReport {
    MeanCi precision;
    MeanCi recall;
    MeanCi f1;
    std::vector<DocumentEval> per_document;
};

/// Failed documents count as impure, incomplete, GIoU -1 and zero GRITS.
TdReport summarize_td(std::span<const DocumentEval> docs);
TsrReport summarize_tsr(std::span<const DocumentEval> docs);

}  // namespace tabrefine
