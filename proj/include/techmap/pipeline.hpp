#pragma once
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "techmap/compare.hpp"

namespace techmap {

enum class CentralityBasis { full, backbone };
enum class LouvainBasis { full, backbone };

struct PipelineConfig {
    std::filesystem::path input;
    std::filesystem::path schema;  // empty = default column names
    std::filesystem::path output_dir;
    std::vector<std::string> exclusion_patterns = {"*99"};
    std::vector<PeriodSpec> periods;      // default: the four standard windows
    std::vector<MeasureId> measures;      // default: all twelve
    std::size_t backbone_multiplier = 2;
    std::uint64_t community_seed = 42;
    double centrality_tolerance = 1e-10;
    std::size_t centrality_max_iterations = 10000;
    PairFilter pairs = PairFilter::all;
    CooccurrenceUniverse cooccurrence_universe = CooccurrenceUniverse::diversified;
    bool d2_keep_diagonal = false;
    CentralityBasis centrality_on = CentralityBasis::full;
    LouvainBasis louvain_on = LouvainBasis::backbone;
    std::size_t jobs = 1;

    static PipelineConfig load(const std::filesystem::path& path);
    void validate() const;

    // The period driving networks, tables 3-5 and exports: widest span,
    // first wins on ties.
    PeriodSpec primary_period() const;

    // Digest over the fields that change results; output_dir and jobs are
    // excluded.
    std::string semantic_digest() const;
};

struct StageRecord {
    std::string name;
    bool cache_hit = false;
    std::vector<std::string> outputs;  // relative to output_dir
    std::vector<std::string> warnings;
};

struct RunManifest {
    std::string toolkit_version;
    std::string config_digest;
    std::string input_digest;
    std::string started_at;
    std::string finished_at;
    std::vector<StageRecord> stages;
};

// Runs ingest -> aggregate -> measure -> network -> compare with
// content-digest caching; writes run_manifest.json into the output
// directory. Any stage error removes that stage's partial outputs and
// rethrows with the stage name.
RunManifest run_pipeline(const PipelineConfig& config);

// Re-exports the backbone of one measure's network with the agent's
// classes flagged. Requires the pipeline artifacts for that measure and
// the primary period; appends an overlay stage to the manifest.
std::vector<std::filesystem::path> export_overlay(const PipelineConfig& config,
                                                  const std::string& agent_id, AgentKind kind,
                                                  const PeriodSpec& period,
                                                  MeasureId measure = MeasureId::B1);

}  // namespace techmap
