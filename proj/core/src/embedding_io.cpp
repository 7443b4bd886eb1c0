#include "force2vec/embedding_io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

namespace force2vec {

namespace {

void append_float(std::string& buf, float value) {
  char tmp[32];
  const auto res = std::to_chars(tmp, tmp + sizeof(tmp), value);
  buf.append(tmp, res.ptr);
}

}  // namespace

void write_embedding(std::ostream& out, const EmbeddingMatrix& z) {
  std::string buf;
  buf.reserve(z.dim() * 16 + 16);
  out << z.rows() << ' ' << z.dim() << '\n';
  for (VertexId u = 0; u < z.rows(); ++u) {
    buf.clear();
    buf.append(std::to_string(u));
    for (float x : z.row(u)) {
      buf.push_back(' ');
      append_float(buf, x);
    }
    buf.push_back('\n');
    out << buf;
  }
  if (!out) throw IoError("failed writing embedding");
}

EmbeddingMatrix read_embedding(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError("missing embedding header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::uint64_t n = 0, d = 0;
  {
    const char* p = line.data();
    const char* end = p + line.size();
    auto [q1, e1] = std::from_chars(p, end, n);
    p = q1;
    while (p < end && std::isspace(static_cast<unsigned char>(*p))) ++p;
    auto [q2, e2] = std::from_chars(p, end, d);
    if (e1 != std::errc() || e2 != std::errc() || n == 0 || d == 0)
      throw FormatError("bad embedding header at line 1");
  }
  EmbeddingMatrix z(static_cast<VertexId>(n), static_cast<std::uint32_t>(d));
  std::vector<bool> filled(n, false);
  std::size_t rows_read = 0;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    bool blank = true;
    for (char c : line)
      if (!std::isspace(static_cast<unsigned char>(c))) { blank = false; break; }
    if (blank) continue;
    if (rows_read == n)
      throw FormatError("extra body line " + std::to_string(line_no));

    const char* p = line.data();
    const char* end = p + line.size();
    std::uint64_t id = 0;
    auto [q, ec] = std::from_chars(p, end, id);
    if (ec != std::errc() || id >= n)
      throw FormatError("bad vertex id at line " + std::to_string(line_no));
    if (filled[id])
      throw FormatError("duplicate vertex id at line " + std::to_string(line_no));
    p = q;
    auto row = z.row(static_cast<VertexId>(id));
    for (std::uint64_t j = 0; j < d; ++j) {
      while (p < end && std::isspace(static_cast<unsigned char>(*p))) ++p;
      float value;
      auto [q2, e2] = std::from_chars(p, end, value);
      if (e2 != std::errc())
        throw FormatError("expected " + std::to_string(d + 1) +
                          " tokens at line " + std::to_string(line_no));
      row[j] = value;
      p = q2;
    }
    while (p < end && std::isspace(static_cast<unsigned char>(*p))) ++p;
    if (p != end)
      throw FormatError("trailing tokens at line " + std::to_string(line_no));
    filled[id] = true;
    ++rows_read;
  }
  if (rows_read != n)
    throw FormatError("expected " + std::to_string(n) + " body lines, got " +
                      std::to_string(rows_read));
  return z;
}

void write_layout_tsv(std::ostream& out, const EmbeddingMatrix& z,
                      const LabeledNodes* labels) {
  if (z.dim() != 2)
    throw UsageError("layout export requires a 2-D embedding (train with dim 2)");
  std::string buf;
  for (VertexId u = 0; u < z.rows(); ++u) {
    buf.clear();
    buf.append(std::to_string(u));
    buf.push_back('\t');
    append_float(buf, z.row(u)[0]);
    buf.push_back('\t');
    append_float(buf, z.row(u)[1]);
    if (labels && u < labels->labels.size() && !labels->labels[u].empty()) {
      buf.push_back('\t');
      buf.append(std::to_string(labels->labels[u][0]));
    }
    buf.push_back('\n');
    out << buf;
  }
  if (!out) throw IoError("failed writing layout tsv");
}

void write_layout_svg(std::ostream& out, const EmbeddingMatrix& z,
                      const LabeledNodes* labels) {
  if (z.dim() != 2)
    throw UsageError("layout export requires a 2-D embedding (train with dim 2)");
  float min_x = INFINITY, max_x = -INFINITY, min_y = INFINITY, max_y = -INFINITY;
  for (VertexId u = 0; u < z.rows(); ++u) {
    min_x = std::min(min_x, z.row(u)[0]);
    max_x = std::max(max_x, z.row(u)[0]);
    min_y = std::min(min_y, z.row(u)[1]);
    max_y = std::max(max_y, z.row(u)[1]);
  }
  const float span_x = std::max(max_x - min_x, 1e-9f);
  const float span_y = std::max(max_y - min_y, 1e-9f);
  const int size = 800, margin = 20;
  static const char* kPalette[] = {
      "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b",
      "#e377c2", "#7f7f7f", "#bcbd22", "#17becf", "#aec7e8", "#ffbb78"};
  constexpr int kPaletteSize = 12;

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size
      << "\" height=\"" << size << "\" viewBox=\"0 0 " << size << ' ' << size
      << "\">\n";
  for (VertexId u = 0; u < z.rows(); ++u) {
    const double x = margin + (z.row(u)[0] - min_x) / span_x * (size - 2 * margin);
    const double y = margin + (max_y - z.row(u)[1]) / span_y * (size - 2 * margin);
    const char* color = kPalette[0];
    if (labels && u < labels->labels.size() && !labels->labels[u].empty())
      color = kPalette[labels->labels[u][0] % kPaletteSize];
    out << "<circle cx=\"" << x << "\" cy=\"" << y << "\" r=\"2.5\" fill=\""
        << color << "\" fill-opacity=\"0.8\"/>\n";
  }
  out << "</svg>\n";
  if (!out) throw IoError("failed writing layout svg");
}

}  // namespace force2vec
