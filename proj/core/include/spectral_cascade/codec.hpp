#pragma once

#include <cstdint>
#include <nlohmann/json.hpp>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "spectral_cascade/blocks.hpp"
#include "spectral_cascade/diagonal_blocks.hpp"
#include "spectral_cascade/matrix.hpp"
#include "spectral_cascade/product_spectrum.hpp"

namespace spectral_cascade {

using Json = nlohmann::json;

// Field-level codecs. Readers throw kParse on a missing field, a wrong type
// or a non-finite number; doubles round-trip exactly.
Json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const Json& j);
Json structure_to_json(const BlockStructure& s);
BlockStructure structure_from_json(const Json& j);
Json block_to_json(const DiagonalBlock& b);
DiagonalBlock block_from_json(const Json& j);
Json blocks_to_json(std::span<const DiagonalBlock> blocks);
std::vector<DiagonalBlock> blocks_from_json(const Json& j);
Json spectrum_to_json(const ScaledSpectrum& s);
ScaledSpectrum spectrum_from_json(const Json& j);

namespace json_field {
const Json& get(const Json& j, const char* key);
double number(const Json& j, const char* key);
std::int64_t integer(const Json& j, const char* key);
std::uint64_t unsigned_integer(const Json& j, const char* key);
bool boolean(const Json& j, const char* key);
}  // namespace json_field

// An artifact is a JSON object holding its body fields next to "format",
// "kind", "version" and "digest". The digest is FNV-1a 64 over
// canonical_text() of the object without "digest".
inline constexpr std::string_view kArtifactFormat = "spectral-cascade";
inline constexpr int kArtifactVersion = 1;

std::uint64_t fnv1a64(std::string_view bytes);
std::string digest_hex(std::uint64_t h);
/// dump(2) followed by a newline; object keys sorted.
std::string canonical_text(const Json& j);
Json make_artifact(std::string_view kind, Json body);
std::string artifact_digest(const Json& artifact);

void write_text_file(const std::string& path, std::string_view text);
std::string read_text_file(const std::string& path);
void write_artifact(const std::string& path, const Json& artifact);
/// Parses a JSON file; throws kParse. A present "digest" must match; an
/// absent one is accepted unless `require_digest` (hand-written inputs).
Json read_artifact(const std::string& path, bool require_digest = false);

}  // namespace spectral_cascade
