#include "spectral_cascade/codec.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "spectral_cascade/error.hpp"

namespace spectral_cascade {

namespace {

[[noreturn]] void parse_error(const std::string& what) { throw Error(ErrorKind::kParse, what); }

const Json& find_field(const Json& j, const char* key) {
  if (!j.is_object()) parse_error(std::string("expected an object holding \"") + key + "\"");
  const auto it = j.find(key);
  if (it == j.end()) parse_error(std::string("missing field \"") + key + "\"");
  return *it;
}

}  // namespace

namespace json_field {

const Json& get(const Json& j, const char* key) { return find_field(j, key); }

double number(const Json& j, const char* key) {
  const Json& v = get(j, key);
  if (!v.is_number()) parse_error(std::string("field \"") + key + "\" is not a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) parse_error(std::string("field \"") + key + "\" is not finite");
  return x;
}

std::int64_t integer(const Json& j, const char* key) {
  const Json& v = get(j, key);
  if (!v.is_number_integer()) parse_error(std::string("field \"") + key + "\" is not an integer");
  return v.get<std::int64_t>();
}

std::uint64_t unsigned_integer(const Json& j, const char* key) {
  const Json& v = get(j, key);
  if (!v.is_number_unsigned()) {
    parse_error(std::string("field \"") + key + "\" is not a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

bool boolean(const Json& j, const char* key) {
  const Json& v = get(j, key);
  if (!v.is_boolean()) parse_error(std::string("field \"") + key + "\" is not a boolean");
  return v.get<bool>();
}

}  // namespace json_field

using json_field::integer;
using json_field::number;

namespace {
const Json& field(const Json& j, const char* key) { return json_field::get(j, key); }
}  // namespace

Json matrix_to_json(const Matrix& m) {
  Json data = Json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (std::size_t c = 0; c < m.cols(); ++c) {
      const double x = m(r, c);
      if (!std::isfinite(x)) throw Error(ErrorKind::kOverflow, "non-finite matrix entry");
      row.push_back(x);
    }
    data.push_back(std::move(row));
  }
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

Matrix matrix_from_json(const Json& j) {
  const std::int64_t rows = integer(j, "rows");
  const std::int64_t cols = integer(j, "cols");
  const Json& data = field(j, "data");
  if (rows < 0 || cols < 0 || !data.is_array() || data.size() != static_cast<std::size_t>(rows)) {
    parse_error("matrix row count and data disagree");
  }
  std::vector<double> v;
  v.reserve(static_cast<std::size_t>(rows * cols));
  for (const Json& row : data) {
    if (!row.is_array() || row.size() != static_cast<std::size_t>(cols)) {
      parse_error("matrix row length differs from cols");
    }
    for (const Json& x : row) {
      if (!x.is_number() || !std::isfinite(x.get<double>())) parse_error("non-finite matrix entry");
      v.push_back(x.get<double>());
    }
  }
  return Matrix(static_cast<std::size_t>(rows), static_cast<std::size_t>(cols), std::move(v));
}

Json structure_to_json(const BlockStructure& s) { return {{"sizes", s.sizes()}}; }

BlockStructure structure_from_json(const Json& j) {
  const Json& sizes = field(j, "sizes");
  if (!sizes.is_array()) parse_error("\"sizes\" is not an array");
  std::vector<int> v;
  for (const Json& x : sizes) {
    if (!x.is_number_integer()) parse_error("block size is not an integer");
    v.push_back(x.get<int>());
  }
  return BlockStructure(std::move(v));
}

Json block_to_json(const DiagonalBlock& b) {
  if (b.size == 1) return {{"size", 1}, {"lambda", b.lambda}};
  return {{"size", 2}, {"modulus", b.modulus}, {"theta", b.theta}};
}

DiagonalBlock block_from_json(const Json& j) {
  const std::int64_t size = integer(j, "size");
  if (size == 1) return DiagonalBlock::scalar(number(j, "lambda"));
  if (size == 2) return DiagonalBlock::rotation(number(j, "modulus"), number(j, "theta"));
  parse_error("block size must be 1 or 2");
}

Json blocks_to_json(std::span<const DiagonalBlock> blocks) {
  Json out = Json::array();
  for (const auto& b : blocks) out.push_back(block_to_json(b));
  return out;
}

std::vector<DiagonalBlock> blocks_from_json(const Json& j) {
  if (!j.is_array()) parse_error("block list is not an array");
  std::vector<DiagonalBlock> out;
  for (const Json& b : j) out.push_back(block_from_json(b));
  return out;
}

Json spectrum_to_json(const ScaledSpectrum& s) {
  Json out = Json::array();
  for (const auto& e : s) {
    out.push_back({{"log_abs", e.log_abs},
                   {"arg", e.arg},
                   {"real", e.real},
                   {"re", e.real_part_decimal()},
                   {"im", e.imag_part_decimal()}});
  }
  return out;
}

ScaledSpectrum spectrum_from_json(const Json& j) {
  if (!j.is_array()) parse_error("spectrum is not an array");
  ScaledSpectrum out;
  for (const Json& e : j) {
    out.push_back({number(e, "log_abs"), number(e, "arg"), json_field::boolean(e, "real")});
  }
  return out;
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string digest_hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string canonical_text(const Json& j) { return j.dump(2) + "\n"; }

std::string artifact_digest(const Json& artifact) {
  Json copy = artifact;
  copy.erase("digest");
  return "fnv1a64:" + digest_hex(fnv1a64(canonical_text(copy)));
}

Json make_artifact(std::string_view kind, Json body) {
  if (!body.is_object()) throw Error(ErrorKind::kInvalidArgument, "artifact body must be an object");
  for (const char* key : {"format", "kind", "version", "digest"}) {
    if (body.contains(key)) throw Error(ErrorKind::kInvalidArgument, std::string("reserved key ") + key);
  }
  body["format"] = kArtifactFormat;
  body["kind"] = kind;
  body["version"] = kArtifactVersion;
  body["digest"] = artifact_digest(body);
  return body;
}

void write_text_file(const std::string& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::kInvalidArgument, "cannot open " + path + " for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error(ErrorKind::kInvalidArgument, "cannot write " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kInvalidArgument, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_artifact(const std::string& path, const Json& artifact) {
  write_text_file(path, canonical_text(artifact));
}

Json read_artifact(const std::string& path, bool require_digest) {
  const std::string text = read_text_file(path);
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::exception& e) {
    parse_error(path + ": " + e.what());
  }
  if (!j.is_object()) parse_error(path + ": top level is not an object");
  const auto it = j.find("digest");
  if (it == j.end()) {
    if (require_digest) parse_error(path + ": no digest");
    return j;
  }
  if (!it->is_string() || it->get<std::string>() != artifact_digest(j)) {
    parse_error(path + ": digest mismatch");
  }
  return j;
}

}  // namespace spectral_cascade
