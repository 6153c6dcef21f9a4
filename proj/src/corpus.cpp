#include "techmap/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <set>
#include <sstream>

#include <json.hpp>

#include "techmap/util.hpp"

namespace techmap {

const std::vector<std::string>& agent_field(const PatentRecord& r, AgentKind kind) {
    switch (kind) {
        case AgentKind::inventor: return r.inventors;
        case AgentKind::organization: return r.organizations;
        case AgentKind::country: return r.countries;
    }
    throw ValidationError("unknown agent kind");
}

std::string to_string(AgentKind kind) {
    switch (kind) {
        case AgentKind::inventor: return "inventor";
        case AgentKind::organization: return "organization";
        case AgentKind::country: return "country";
    }
    throw ValidationError("unknown agent kind");
}

AgentKind agent_kind_from_string(const std::string& s) {
    if (s == "inventor") return AgentKind::inventor;
    if (s == "organization") return AgentKind::organization;
    if (s == "country") return AgentKind::country;
    throw ValidationError("unknown agent kind: " + s);
}

std::string PeriodSpec::label() const {
    return std::to_string(start_year) + "-" + std::to_string(end_year);
}

PeriodSpec PeriodSpec::parse(const std::string& s) {
    auto dash = s.find('-', 1);  // allow a leading minus, not that years use one
    if (dash == std::string::npos)
        throw ValidationError("bad period '" + s + "', expected START-END");
    PeriodSpec p;
    try {
        p.start_year = std::stoi(s.substr(0, dash));
        p.end_year = std::stoi(s.substr(dash + 1));
    } catch (const std::exception&) {
        throw ValidationError("bad period '" + s + "', expected START-END");
    }
    if (p.start_year > p.end_year)
        throw ValidationError("bad period '" + s + "': start exceeds end");
    return p;
}

Corpus::Corpus(std::vector<PatentRecord> records) : records_(std::move(records)) {
    by_id_.reserve(records_.size());
    std::vector<std::string> duplicates;
    for (std::size_t i = 0; i < records_.size(); ++i) {
        if (records_[i].classes.empty())
            throw ValidationError("record '" + records_[i].patent_id + "' has no classes");
        if (!by_id_.emplace(records_[i].patent_id, i).second)
            duplicates.push_back(records_[i].patent_id);
    }
    if (!duplicates.empty()) {
        std::sort(duplicates.begin(), duplicates.end());
        duplicates.erase(std::unique(duplicates.begin(), duplicates.end()), duplicates.end());
        throw ValidationError("duplicate patent ids: " + join(duplicates, ','));
    }
}

const PatentRecord* Corpus::find(const std::string& patent_id) const {
    auto it = by_id_.find(patent_id);
    return it == by_id_.end() ? nullptr : &records_[it->second];
}

CorpusSchema CorpusSchema::load(const std::filesystem::path& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError("bad schema file " + path.string() + ": " + e.what());
    }
    CorpusSchema s;
    auto get = [&](const char* key, std::string& field) {
        if (j.contains("columns") && j["columns"].contains(key))
            field = j["columns"][key].get<std::string>();
    };
    get("id", s.id);
    get("year", s.year);
    get("classes", s.classes);
    get("references", s.references);
    get("inventors", s.inventors);
    get("organizations", s.organizations);
    get("countries", s.countries);
    if (j.contains("delimiter")) {
        auto d = j["delimiter"].get<std::string>();
        if (d.size() != 1) throw SchemaError("delimiter must be a single character");
        s.delimiter = d[0];
    }
    if (j.contains("subdelimiter")) {
        auto d = j["subdelimiter"].get<std::string>();
        if (d.size() != 1) throw SchemaError("subdelimiter must be a single character");
        s.subdelimiter = d[0];
    }
    if (s.delimiter == s.subdelimiter)
        throw SchemaError("delimiter and subdelimiter must differ");
    return s;
}

namespace {

std::vector<std::string> split_multi(const std::string& cell, char subdelim) {
    std::vector<std::string> vals;
    for (auto& v : split(cell, subdelim))
        if (!v.empty()) vals.push_back(v);
    std::sort(vals.begin(), vals.end());
    vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
    return vals;
}

std::string strip_cr(std::string line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
}

}  // namespace

Corpus parse_corpus_text(const std::string& text, const CorpusSchema& schema) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw SchemaError("empty input: no header row");
    auto header = split(strip_cr(line), schema.delimiter);

    auto column = [&](const std::string& name) {
        auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end())
            throw SchemaError("missing required column '" + name + "'");
        return static_cast<std::size_t>(it - header.begin());
    };
    const std::size_t c_id = column(schema.id);
    const std::size_t c_year = column(schema.year);
    const std::size_t c_classes = column(schema.classes);
    const std::size_t c_refs = column(schema.references);
    const std::size_t c_inv = column(schema.inventors);
    const std::size_t c_org = column(schema.organizations);
    const std::size_t c_cty = column(schema.countries);

    std::vector<PatentRecord> records;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        line = strip_cr(line);
        if (line.empty()) continue;
        auto cells = split(line, schema.delimiter);
        if (cells.size() < header.size())
            throw ValidationError("line " + std::to_string(line_no) + ": expected " +
                                  std::to_string(header.size()) + " columns, got " +
                                  std::to_string(cells.size()));
        PatentRecord r;
        r.patent_id = cells[c_id];
        if (r.patent_id.empty())
            throw ValidationError("line " + std::to_string(line_no) + ": empty patent id");
        const std::string& year_cell = cells[c_year];
        auto res = std::from_chars(year_cell.data(), year_cell.data() + year_cell.size(),
                                   r.grant_year);
        if (res.ec != std::errc{} || res.ptr != year_cell.data() + year_cell.size())
            throw ValidationError("line " + std::to_string(line_no) + ": unparseable year '" +
                                  year_cell + "'");
        r.classes = split_multi(cells[c_classes], schema.subdelimiter);
        if (r.classes.empty())
            throw ValidationError("line " + std::to_string(line_no) + ": record '" +
                                  r.patent_id + "' has no classes");
        r.references = split_multi(cells[c_refs], schema.subdelimiter);
        r.inventors = split_multi(cells[c_inv], schema.subdelimiter);
        r.organizations = split_multi(cells[c_org], schema.subdelimiter);
        r.countries = split_multi(cells[c_cty], schema.subdelimiter);
        records.push_back(std::move(r));
    }
    return Corpus(std::move(records));
}

Corpus parse_corpus(const std::filesystem::path& path, const CorpusSchema& schema) {
    return parse_corpus_text(read_file(path), schema);
}

std::string corpus_to_text(const Corpus& corpus, const CorpusSchema& schema) {
    const char d = schema.delimiter;
    const char sd = schema.subdelimiter;
    std::string out;
    out += schema.id;
    out += d;
    out += schema.year;
    out += d;
    out += schema.classes;
    out += d;
    out += schema.references;
    out += d;
    out += schema.inventors;
    out += d;
    out += schema.organizations;
    out += d;
    out += schema.countries;
    out += '\n';
    for (const auto& r : corpus.records()) {
        out += r.patent_id;
        out += d;
        out += std::to_string(r.grant_year);
        out += d;
        out += join(r.classes, sd);
        out += d;
        out += join(r.references, sd);
        out += d;
        out += join(r.inventors, sd);
        out += d;
        out += join(r.organizations, sd);
        out += d;
        out += join(r.countries, sd);
        out += '\n';
    }
    return out;
}

void write_corpus(const Corpus& corpus, const std::filesystem::path& path,
                  const CorpusSchema& schema) {
    write_file_atomic(path, corpus_to_text(corpus, schema));
}

Corpus slice_period(const Corpus& corpus, const PeriodSpec& period) {
    std::vector<PatentRecord> kept;
    for (const auto& r : corpus.records())
        if (period.contains(r.grant_year)) kept.push_back(r);
    return Corpus(std::move(kept));
}

ClassUniverse::ClassUniverse(std::vector<std::string> codes) : codes_(std::move(codes)) {
    std::sort(codes_.begin(), codes_.end());
    codes_.erase(std::unique(codes_.begin(), codes_.end()), codes_.end());
    index_.reserve(codes_.size());
    for (std::size_t i = 0; i < codes_.size(); ++i) index_[codes_[i]] = i;
}

std::optional<std::size_t> ClassUniverse::index_of(const std::string& code) const {
    auto it = index_.find(code);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::vector<std::size_t> ClassUniverse::admitted(const PatentRecord& r) const {
    std::vector<std::size_t> idx;
    for (const auto& c : r.classes)
        if (auto i = index_of(c)) idx.push_back(*i);
    std::sort(idx.begin(), idx.end());
    return idx;
}

ClassUniverse build_class_universe(const Corpus& corpus,
                                   const std::vector<std::string>& exclusion_patterns) {
    std::set<std::string> codes;
    for (const auto& r : corpus.records())
        for (const auto& c : r.classes) codes.insert(c);
    std::vector<std::string> admitted;
    for (const auto& c : codes) {
        bool excluded = false;
        for (const auto& pat : exclusion_patterns)
            if (glob_match(pat, c)) {
                excluded = true;
                break;
            }
        if (!excluded) admitted.push_back(c);
    }
    if (admitted.empty())
        throw ValidationError("class universe is empty after exclusions");
    return ClassUniverse(std::move(admitted));
}

std::size_t count_unclassified(const Corpus& corpus, const ClassUniverse& universe) {
    std::size_t n = 0;
    for (const auto& r : corpus.records())
        if (universe.admitted(r).empty()) ++n;
    return n;
}

}  // namespace techmap
