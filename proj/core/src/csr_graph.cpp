#include "force2vec/csr_graph.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <istream>
#include <ostream>
#include <string>

namespace force2vec {

namespace {

bool is_blank_or_comment(const std::string& line) {
  for (char c : line) {
    if (c == '#' || c == '%') return true;
    if (!std::isspace(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

// Parses up to `max_tokens` unsigned integers from `line`. Extra tokens
// beyond the first two are accepted only if numeric (edge weights).
std::size_t parse_ints(const std::string& line, std::uint64_t* out,
                       std::size_t max_tokens) {
  std::size_t count = 0;
  const char* p = line.data();
  const char* end = p + line.size();
  while (p < end) {
    while (p < end && std::isspace(static_cast<unsigned char>(*p))) ++p;
    if (p >= end) break;
    if (count == max_tokens) return max_tokens + 1;  // too many tokens
    double dummy;
    if (count >= 2) {
      // weight column: any real number is fine
      auto [q, ec] = std::from_chars(p, end, dummy);
      if (ec != std::errc()) return static_cast<std::size_t>(-1);
      p = q;
    } else {
      auto [q, ec] = std::from_chars(p, end, out[count]);
      if (ec != std::errc()) return static_cast<std::size_t>(-1);
      p = q;
      if (p < end && !std::isspace(static_cast<unsigned char>(*p)))
        return static_cast<std::size_t>(-1);
    }
    ++count;
  }
  return count;
}

}  // namespace

CsrGraph CsrGraph::from_edges(std::vector<std::pair<VertexId, VertexId>> edges,
                              VertexId n, bool symmetrize,
                              std::uint64_t* duplicates_dropped,
                              std::uint64_t* self_loops_dropped) {
  std::uint64_t self_loops = 0;
  std::erase_if(edges, [&](const auto& e) {
    if (e.first == e.second) {
      ++self_loops;
      return true;
    }
    return false;
  });
  if (symmetrize) {
    const std::size_t k = edges.size();
    edges.reserve(2 * k);
    for (std::size_t i = 0; i < k; ++i)
      edges.emplace_back(edges[i].second, edges[i].first);
  }
  std::sort(edges.begin(), edges.end());
  const std::size_t before = edges.size();
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  std::uint64_t duplicates = before - edges.size();
  if (symmetrize) duplicates /= 2;  // each input duplicate was doubled

  CsrGraph g;
  g.num_vertices_ = n;
  g.symmetric_ = symmetrize;
  g.row_offsets_.assign(n + 1, 0);
  g.col_indices_.resize(edges.size());
  for (const auto& [u, v] : edges) {
    if (u >= n || v >= n) throw RangeError("edge endpoint out of range");
    ++g.row_offsets_[u + 1];
  }
  for (VertexId u = 0; u < n; ++u) g.row_offsets_[u + 1] += g.row_offsets_[u];
  for (std::size_t i = 0; i < edges.size(); ++i)
    g.col_indices_[i] = edges[i].second;

  if (duplicates_dropped) *duplicates_dropped = duplicates;
  if (self_loops_dropped) *self_loops_dropped = self_loops;
  return g;
}

bool CsrGraph::has_edge(VertexId u, VertexId v) const {
  auto row = neighbors(u);
  return std::binary_search(row.begin(), row.end(), v);
}

DegreeHistogram degree_histogram(const CsrGraph& g) {
  const VertexId n = g.num_vertices();
  DegreeHistogram h;
  h.degrees.resize(n);
  h.prefix.resize(n + 1);
  h.prefix[0] = 0;
  for (VertexId u = 0; u < n; ++u) {
    h.degrees[u] = g.degree(u);
    h.prefix[u + 1] = h.prefix[u] + h.degrees[u];
  }
  return h;
}

namespace {

// Remaps raw ids to dense 0-based ids (sorted by original value) when
// they are not already contiguous from 0.
CsrGraph finish_graph(std::vector<std::pair<std::uint64_t, std::uint64_t>> raw,
                      const LoadOptions& opts, LoadStats* stats,
                      std::uint64_t declared_n) {
  if (raw.empty()) throw FormatError("empty graph: no edges found");

  std::vector<std::uint64_t> ids;
  ids.reserve(2 * raw.size());
  for (const auto& [u, v] : raw) {
    ids.push_back(u);
    ids.push_back(v);
  }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());

  std::uint64_t n;
  std::vector<std::uint64_t> remap_table;
  const bool dense = ids.back() + 1 == ids.size() || declared_n > 0;
  if (dense) {
    n = declared_n > 0 ? declared_n : ids.size();
  } else {
    n = ids.size();
    remap_table = ids;
  }

  std::uint64_t dup = 0, loops = 0;
  std::vector<std::pair<VertexId, VertexId>> edges;
  edges.reserve(raw.size());
  for (auto& [u, v] : raw) {
    if (!remap_table.empty()) {
      u = std::lower_bound(ids.begin(), ids.end(), u) - ids.begin();
      v = std::lower_bound(ids.begin(), ids.end(), v) - ids.begin();
    }
    edges.emplace_back(static_cast<VertexId>(u), static_cast<VertexId>(v));
  }
  CsrGraph g = CsrGraph::from_edges(std::move(edges), static_cast<VertexId>(n),
                                    opts.symmetrize, &dup, &loops);
  if (!remap_table.empty()) g.set_original_ids(std::move(remap_table));
  if (stats) {
    stats->duplicates_dropped = dup;
    stats->self_loops_dropped = loops;
    stats->remapped = g.original_ids().empty() ? 0 : g.num_vertices();
  }
  return g;
}

}  // namespace

CsrGraph load_edge_list(std::istream& in, const LoadOptions& opts,
                        LoadStats* stats) {
  std::vector<std::pair<std::uint64_t, std::uint64_t>> raw;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (is_blank_or_comment(line)) continue;
    std::uint64_t tok[2];
    std::size_t count = parse_ints(line, tok, 3);
    if (count < 2 || count > 3)
      throw FormatError("parse error at line " + std::to_string(line_no) +
                        ": expected \"u v[ w]\"");
    if (opts.one_indexed) {
      if (tok[0] == 0 || tok[1] == 0)
        throw FormatError("parse error at line " + std::to_string(line_no) +
                          ": id 0 in one-indexed input");
      --tok[0];
      --tok[1];
    }
    raw.emplace_back(tok[0], tok[1]);
  }
  if (in.bad()) throw IoError("read failure on edge list input");
  return finish_graph(std::move(raw), opts, stats, 0);
}

CsrGraph load_matrix_market(std::istream& in, const LoadOptions& opts,
                            LoadStats* stats) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError("missing MatrixMarket header");
  strip_cr(line);
  // Header: %%MatrixMarket object format [field] [symmetry]
  std::vector<std::string> fields;
  {
    std::size_t pos = 0;
    while (pos < line.size()) {
      while (pos < line.size() && std::isspace(static_cast<unsigned char>(line[pos]))) ++pos;
      std::size_t start = pos;
      while (pos < line.size() && !std::isspace(static_cast<unsigned char>(line[pos]))) ++pos;
      if (pos > start) fields.push_back(line.substr(start, pos - start));
    }
  }
  auto lower = [](std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
  };
  if (fields.size() < 4 || lower(fields[0]) != "%%matrixmarket" ||
      lower(fields[1]) != "matrix")
    throw FormatError("unknown MatrixMarket header: " + line);
  if (lower(fields[2]) != "coordinate")
    throw FormatError("unsupported MatrixMarket format \"" + fields[2] +
                      "\" (only coordinate is supported)");
  const std::string field = lower(fields[3]);
  if (field != "pattern" && field != "real" && field != "integer")
    throw FormatError("unsupported MatrixMarket field \"" + fields[3] + "\"");
  std::string symmetry = fields.size() > 4 ? lower(fields[4]) : "general";
  if (symmetry != "general" && symmetry != "symmetric")
    throw FormatError("unsupported MatrixMarket symmetry \"" + symmetry + "\"");

  std::size_t line_no = 1;
  // size line
  std::uint64_t rows = 0, cols = 0, nnz = 0;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (is_blank_or_comment(line)) continue;
    std::uint64_t tok[3];
    const char* p = line.data();
    const char* end = p + line.size();
    int count = 0;
    for (; count < 3; ++count) {
      while (p < end && std::isspace(static_cast<unsigned char>(*p))) ++p;
      if (p >= end) break;
      auto [q, ec] = std::from_chars(p, end, tok[count]);
      if (ec != std::errc())
        throw FormatError("bad size line at line " + std::to_string(line_no));
      p = q;
    }
    if (count != 3)
      throw FormatError("bad size line at line " + std::to_string(line_no));
    rows = tok[0];
    cols = tok[1];
    nnz = tok[2];
    break;
  }
  if (rows == 0 || cols == 0)
    throw FormatError("missing MatrixMarket size line");
  if (rows != cols)
    throw RangeError("adjacency matrix must be square, got " +
                     std::to_string(rows) + "x" + std::to_string(cols));

  std::vector<std::pair<std::uint64_t, std::uint64_t>> raw;
  raw.reserve(symmetry == "symmetric" ? 2 * nnz : nnz);
  std::uint64_t seen = 0;
  while (seen < nnz && std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (is_blank_or_comment(line)) continue;
    std::uint64_t tok[2];
    std::size_t count = parse_ints(line, tok, 3);
    if (count < 2)
      throw FormatError("parse error at line " + std::to_string(line_no));
    if (field != "pattern" && count != 3)
      throw FormatError("missing value at line " + std::to_string(line_no));
    if (tok[0] == 0 || tok[1] == 0 || tok[0] > rows || tok[1] > cols)
      throw RangeError("entry out of range at line " + std::to_string(line_no));
    raw.emplace_back(tok[0] - 1, tok[1] - 1);
    if (symmetry == "symmetric" && tok[0] != tok[1])
      raw.emplace_back(tok[1] - 1, tok[0] - 1);
    ++seen;
  }
  if (seen != nnz)
    throw FormatError("expected " + std::to_string(nnz) + " entries, got " +
                      std::to_string(seen));
  return finish_graph(std::move(raw), opts, stats, rows);
}

void write_edge_list(const CsrGraph& g, std::ostream& out) {
  for (VertexId u = 0; u < g.num_vertices(); ++u)
    for (VertexId v : g.neighbors(u)) out << u << ' ' << v << '\n';
}

void write_remap_table(const CsrGraph& g, std::ostream& out) {
  const auto& ids = g.original_ids();
  for (std::size_t i = 0; i < ids.size(); ++i) out << ids[i] << ' ' << i << '\n';
}

}  // namespace force2vec
