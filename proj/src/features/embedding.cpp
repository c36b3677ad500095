#include <charconv>
#include <fstream>

#include "argq/errors.hpp"
#include "argq/features.hpp"

namespace argq::features {

namespace {

std::vector<std::string_view> fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

bool parse_float(std::string_view s, float& out) {
  const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

}  // namespace

EmbeddingTable::EmbeddingTable(std::size_t dim,
                               std::unordered_map<std::string, std::vector<float>> vectors)
    : dim_(dim), vectors_(std::move(vectors)) {
  for (const auto& [w, v] : vectors_) {
    if (v.size() != dim_) throw ConfigError("embedding vector for '" + w + "' has wrong dimension");
  }
}

EmbeddingTable EmbeddingTable::load(const std::filesystem::path& path,
                                    const std::unordered_map<std::string, bool>* vocabulary) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open embedding file " + path.string());
  std::unordered_map<std::string, std::vector<float>> vectors;
  std::size_t dim = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto f = fields(line);
    if (f.empty()) continue;
    if (line_no == 1 && f.size() == 2) {
      std::size_t a = 0, b = 0;
      const bool ia = std::from_chars(f[0].data(), f[0].data() + f[0].size(), a).ec == std::errc();
      const bool ib = std::from_chars(f[1].data(), f[1].data() + f[1].size(), b).ec == std::errc();
      if (ia && ib) continue;  // "count dim" header
    }
    if (f.size() < 2) {
      throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": missing vector values");
    }
    const std::size_t d = f.size() - 1;
    if (dim == 0) {
      dim = d;
    } else if (d != dim) {
      throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": dimension " +
                        std::to_string(d) + " differs from " + std::to_string(dim));
    }
    std::string word(f[0]);
    if (vocabulary && !vocabulary->count(word)) continue;
    std::vector<float> v(d);
    for (std::size_t k = 0; k < d; ++k) {
      if (!parse_float(f[k + 1], v[k])) {
        throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": bad number '" +
                          std::string(f[k + 1]) + "'");
      }
    }
    vectors.emplace(std::move(word), std::move(v));
  }
  if (dim == 0) throw ConfigError("embedding file " + path.string() + " has no vectors");
  return EmbeddingTable(dim, std::move(vectors));
}

const std::vector<float>* EmbeddingTable::find(const std::string& surface,
                                               const std::string& lower) const {
  if (auto it = vectors_.find(surface); it != vectors_.end()) return &it->second;
  if (auto it = vectors_.find(lower); it != vectors_.end()) return &it->second;
  return nullptr;
}

std::vector<double> document_embedding(const textproc::DocumentAnalysis& doc,
                                       const EmbeddingTable& table) {
  std::vector<double> sum(table.dim(), 0.0);
  std::size_t n = 0;
  for (const auto& t : doc.tokens) {
    if (t.kind != textproc::TokenKind::word) continue;
    const auto* v = table.find(t.surface, t.lower);
    if (!v) continue;
    for (std::size_t k = 0; k < sum.size(); ++k) sum[k] += (*v)[k];
    ++n;
  }
  if (n) {
    for (auto& x : sum) x /= static_cast<double>(n);
  }
  return sum;
}

}  // namespace argq::features
