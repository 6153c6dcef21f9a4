#pragma once
#include <compare>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "techmap/errors.hpp"

namespace techmap {

// One granted patent. Multi-value fields are kept sorted and unique so
// that parse -> write -> parse round-trips to an equal corpus.
struct PatentRecord {
    std::string patent_id;
    int grant_year = 0;
    std::vector<std::string> classes;
    std::vector<std::string> references;
    std::vector<std::string> inventors;
    std::vector<std::string> organizations;
    std::vector<std::string> countries;

    bool operator==(const PatentRecord&) const = default;
};

enum class AgentKind { inventor, organization, country };

const std::vector<std::string>& agent_field(const PatentRecord& r, AgentKind kind);
std::string to_string(AgentKind kind);
AgentKind agent_kind_from_string(const std::string& s);

// Inclusive year range, e.g. 1976-2006.
struct PeriodSpec {
    int start_year = 0;
    int end_year = 0;

    bool contains(int year) const { return start_year <= year && year <= end_year; }
    int span() const { return end_year - start_year; }
    std::string label() const;
    static PeriodSpec parse(const std::string& s);  // "1976-2006"

    auto operator<=>(const PeriodSpec&) const = default;
};

class Corpus {
  public:
    Corpus() = default;
    // Validates patent_id uniqueness and nonempty class sets.
    explicit Corpus(std::vector<PatentRecord> records);

    const std::vector<PatentRecord>& records() const { return records_; }
    std::size_t size() const { return records_.size(); }
    const PatentRecord* find(const std::string& patent_id) const;

    bool operator==(const Corpus& other) const { return records_ == other.records_; }

  private:
    std::vector<PatentRecord> records_;
    std::unordered_map<std::string, std::size_t> by_id_;
};

// Column-name mapping plus delimiters for delimited record files.
struct CorpusSchema {
    std::string id = "id";
    std::string year = "year";
    std::string classes = "classes";
    std::string references = "references";
    std::string inventors = "inventors";
    std::string organizations = "organizations";
    std::string countries = "countries";
    char delimiter = ';';
    char subdelimiter = '|';

    static CorpusSchema load(const std::filesystem::path& path);  // JSON file
};

Corpus parse_corpus(const std::filesystem::path& path, const CorpusSchema& schema = {});
Corpus parse_corpus_text(const std::string& text, const CorpusSchema& schema = {});

// Normalized form: canonical column order, sorted multi-value cells.
std::string corpus_to_text(const Corpus& corpus, const CorpusSchema& schema = {});
void write_corpus(const Corpus& corpus, const std::filesystem::path& path,
                  const CorpusSchema& schema = {});

Corpus slice_period(const Corpus& corpus, const PeriodSpec& period);

// Sorted admitted class codes with index lookup.
class ClassUniverse {
  public:
    ClassUniverse() = default;
    explicit ClassUniverse(std::vector<std::string> codes);

    const std::vector<std::string>& codes() const { return codes_; }
    std::size_t size() const { return codes_.size(); }
    std::optional<std::size_t> index_of(const std::string& code) const;
    // Admitted class indices of a record, ascending.
    std::vector<std::size_t> admitted(const PatentRecord& r) const;

    bool operator==(const ClassUniverse& other) const { return codes_ == other.codes_; }

  private:
    std::vector<std::string> codes_;
    std::unordered_map<std::string, std::size_t> index_;
};

ClassUniverse build_class_universe(const Corpus& corpus,
                                   const std::vector<std::string>& exclusion_patterns);

// Records whose classes all fall outside the universe. They stay in the
// corpus but contribute to no class; callers report the count.
std::size_t count_unclassified(const Corpus& corpus, const ClassUniverse& universe);

}  // namespace techmap
