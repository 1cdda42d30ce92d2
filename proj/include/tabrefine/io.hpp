#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "tabrefine/ga.hpp"
#include "tabrefine/metrics.hpp"
#include "tabrefine/model.hpp"
#include "tabrefine/pipeline.hpp"
#include "tabrefine/synth.hpp"

namespace tabrefine {

using Json = nlohmann::json;

/// Interchange numbers carry at most three fractional digits.
double round3(double v);

Json to_json(const BBox& b);
BBox bbox_from_json(const Json& j);

/// Grid fields {rows, columns, header_rows}; the table box is not stored and
/// is rebuilt as the hull of rows and columns.
Json grid_to_json(const TableGrid& grid);
TableGrid grid_from_json(const Json& j);

/// page, tokens, candidates, optional tsr, optional gt {bbox, tsr, cells}.
Json document_to_json(const Document& doc);
/// Unknown fields are ignored. Throws Error(ParseError) or a validation error.
Document document_from_json(const Json& j);

Json params_to_json(const ParamSet& p);
/// Starts from `base` and overrides the fields present. Validates the result.
ParamSet params_from_json(const Json& j, const ParamSet& base = {});

Json toggles_to_json(const ModuleToggles& t);
ModuleToggles toggles_from_json(const Json& j, const ModuleToggles& base = {});

struct RunConfig {
    ParamSet params;
    ModuleToggles toggles;
    std::optional<std::filesystem::path> dictionary;
    std::optional<std::filesystem::path> input;
    std::optional<std::filesystem::path> output;
    std::optional<std::uint64_t> rng_seed;
};

Json config_to_json(const RunConfig& c);
/// Relative paths resolve against `base_dir`. Referenced paths must exist,
/// except the output. Throws Error(IoError) and Error(ParseError).
RunConfig config_from_json(const Json& j, const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);

Json trace_to_json(const std::vector<StageTrace>& trace);
Json result_to_json(const std::string& id, const PipelineResult& r);

Json genome_to_json(const Genome& g);
Json generation_to_json(const GenerationLog& g);

Json evaluation_to_json(const TdReport& td, const TsrReport& tsr);

Json read_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const Json& j);

struct NamedDocument {
    std::string id;
    Document doc;
};

/// A single file, or every *.json file of a directory except manifest.json,
/// in file-name order. The id is the file stem.
std::vector<std::filesystem::path> document_files(const std::filesystem::path& path);
NamedDocument read_document(const std::filesystem::path& file);

/// One file per document plus manifest.json.
void write_corpus(const std::filesystem::path& dir, const std::vector<CorpusItem>& items, std::uint64_t seed);

}  // namespace tabrefine
