#pragma once
#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

namespace techmap {

// Splits on every occurrence of delim; empty tokens are kept.
std::vector<std::string> split(const std::string& s, char delim);
std::string join(const std::vector<std::string>& parts, char delim);

// Shell-style wildcard match with '*' and '?'.
bool glob_match(const std::string& pattern, const std::string& text);

// Canonical numeric formats: 12 significant digits for matrix files,
// 3 decimals for the report tables.
std::string format_sig12(double v);
std::string format_fixed3(double v);

// FNV-1a, the digest used for cache keys and manifests. Stable across
// machines for identical bytes.
inline constexpr std::uint64_t kFnvBasis = 14695981039346656037ull;
std::uint64_t fnv1a(const void* data, std::size_t len, std::uint64_t h = kFnvBasis);
std::uint64_t fnv1a(const std::string& s, std::uint64_t h = kFnvBasis);
std::string digest_hex(std::uint64_t h);
std::uint64_t digest_file(const std::filesystem::path& p);

std::string read_file(const std::filesystem::path& p);
// Writes to a temp file in the same directory, then renames.
void write_file_atomic(const std::filesystem::path& p, const std::string& content);

std::string iso8601_utc_now();

// Runs fn(i) for i in [0, count) on up to jobs threads. The first
// exception thrown by any task is rethrown after all threads join.
void parallel_for(std::size_t count, std::size_t jobs, const std::function<void(std::size_t)>& fn);

}  // namespace techmap
