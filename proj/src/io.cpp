#include "feasproj/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

namespace feasproj {

namespace fs = std::filesystem;

namespace {

std::string lower_extension(const fs::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return char(std::tolower(c)); });
  return ext;
}

bool is_matrix_market(const fs::path& path) {
  const std::string ext = lower_extension(path);
  return ext == ".mtx" || ext == ".mm";
}

[[noreturn]] void fail(const fs::path& path, std::size_t line, const std::string& what) {
  throw ParseError(path.string() + ":" + std::to_string(line) + ": " + what);
}

[[noreturn]] void fail(const fs::path& path, const std::string& what) {
  throw ParseError(path.string() + ": " + what);
}

double parse_double(std::string_view token, const fs::path& path, std::size_t line) {
  const char* first = token.data();
  const char* last = token.data() + token.size();
  while (first != last && std::isspace(static_cast<unsigned char>(*first))) ++first;
  while (last != first && std::isspace(static_cast<unsigned char>(*(last - 1)))) --last;
  double value = 0.0;
  const auto res = std::from_chars(first, last, value);
  if (res.ec != std::errc{} || res.ptr != last || first == last) {
    fail(path, line, "invalid number '" + std::string(token) + "'");
  }
  if (!std::isfinite(value)) fail(path, line, "non-finite value");
  return value;
}

long parse_long(std::string_view token, const fs::path& path, std::size_t line) {
  long value = 0;
  const auto res = std::from_chars(token.data(), token.data() + token.size(), value);
  if (res.ec != std::errc{} || res.ptr != token.data() + token.size()) {
    fail(path, line, "invalid integer '" + std::string(token) + "'");
  }
  return value;
}

std::vector<std::string_view> split_whitespace(std::string_view line) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i > start) tokens.push_back(line.substr(start, i - start));
  }
  return tokens;
}

void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

struct MmHeader {
  std::string format;  // array | coordinate
  std::string field;   // real | integer | pattern
};

MmHeader read_mm_header(std::ifstream& in, const fs::path& path, std::size_t& line_no) {
  std::string line;
  if (!std::getline(in, line)) fail(path, "empty file");
  strip_cr(line);
  ++line_no;
  std::istringstream head(line);
  std::string banner, object, format, field, symmetry;
  head >> banner >> object >> format >> field >> symmetry;
  if (banner != "%%MatrixMarket" || object != "matrix") {
    fail(path, line_no, "not a MatrixMarket file");
  }
  if (format != "array" && format != "coordinate") {
    fail(path, line_no, "unsupported MatrixMarket format '" + format + "'");
  }
  if (field != "real" && field != "integer" && field != "pattern") {
    fail(path, line_no, "unsupported MatrixMarket field '" + field + "'");
  }
  if (symmetry != "general") {
    fail(path, line_no, "only 'general' symmetry is supported");
  }
  return {format, field};
}

std::string next_content_line(std::ifstream& in, const fs::path& path, std::size_t& line_no) {
  std::string line;
  while (std::getline(in, line)) {
    strip_cr(line);
    ++line_no;
    if (line.empty() || line[0] == '%') continue;
    return line;
  }
  fail(path, "unexpected end of file");
}

Matrix read_matrix_mm(const fs::path& path) {
  std::ifstream in(path);
  if (!in) fail(path, "cannot open file");
  std::size_t line_no = 0;
  const MmHeader header = read_mm_header(in, path, line_no);
  if (header.field == "pattern") {
    fail(path, line_no, "pattern files carry masks, not matrices");
  }

  const std::string size_line = next_content_line(in, path, line_no);
  const auto size_tokens = split_whitespace(size_line);

  if (header.format == "array") {
    if (size_tokens.size() != 2) fail(path, line_no, "expected 'rows cols'");
    const long rows = parse_long(size_tokens[0], path, line_no);
    const long cols = parse_long(size_tokens[1], path, line_no);
    if (rows < 1 || cols < 1) fail(path, line_no, "dimensions must be positive");
    Matrix out(rows, cols);
    // array format lists values column-major
    for (long j = 0; j < cols; ++j) {
      for (long i = 0; i < rows; ++i) {
        const std::string value_line = next_content_line(in, path, line_no);
        out(i, j) = parse_double(value_line, path, line_no);
      }
    }
    return out;
  }

  if (size_tokens.size() != 3) fail(path, line_no, "expected 'rows cols nnz'");
  const long rows = parse_long(size_tokens[0], path, line_no);
  const long cols = parse_long(size_tokens[1], path, line_no);
  const long nnz = parse_long(size_tokens[2], path, line_no);
  if (rows < 1 || cols < 1 || nnz < 0) fail(path, line_no, "bad size header");
  Matrix out = Matrix::Zero(rows, cols);
  std::vector<std::uint8_t> seen(std::size_t(rows) * std::size_t(cols), 0);
  for (long e = 0; e < nnz; ++e) {
    const std::string entry = next_content_line(in, path, line_no);
    const auto tokens = split_whitespace(entry);
    if (tokens.size() != 3) fail(path, line_no, "expected 'i j value'");
    const long i = parse_long(tokens[0], path, line_no);
    const long j = parse_long(tokens[1], path, line_no);
    if (i < 1 || i > rows || j < 1 || j > cols) fail(path, line_no, "index out of bounds");
    const std::size_t flat = std::size_t(i - 1) * std::size_t(cols) + std::size_t(j - 1);
    if (seen[flat]) fail(path, line_no, "duplicate coordinate");
    seen[flat] = 1;
    out(i - 1, j - 1) = parse_double(tokens[2], path, line_no);
  }
  return out;
}

Matrix read_matrix_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) fail(path, "cannot open file");
  std::vector<std::vector<double>> rows;
  std::size_t width = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    strip_cr(line);
    ++line_no;
    if (line.empty()) continue;
    if (line[0] == '#') continue;
    std::vector<double> row;
    std::size_t start = 0;
    for (;;) {
      const std::size_t comma = line.find(',', start);
      const std::string_view token =
          std::string_view(line).substr(start, comma == std::string::npos
                                                   ? std::string::npos
                                                   : comma - start);
      row.push_back(parse_double(token, path, line_no));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (rows.empty()) {
      width = row.size();
    } else if (row.size() != width) {
      fail(path, line_no, "ragged row: expected " + std::to_string(width) +
                              " values, got " + std::to_string(row.size()));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) fail(path, "no data rows");
  Matrix out(Index(rows.size()), Index(width));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < width; ++j) out(Index(i), Index(j)) = rows[i][j];
  }
  return out;
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

Matrix read_matrix(const fs::path& path) {
  if (!fs::exists(path)) fail(path, "no such file");
  return is_matrix_market(path) ? read_matrix_mm(path) : read_matrix_csv(path);
}

void write_matrix(const Matrix& m, const fs::path& path) {
  require_finite(m, "write_matrix");
  std::ofstream out(path);
  if (!out) fail(path, "cannot open file for writing");
  if (is_matrix_market(path)) {
    out << "%%MatrixMarket matrix array real general\n";
    out << m.rows() << " " << m.cols() << "\n";
    for (Index j = 0; j < m.cols(); ++j) {
      for (Index i = 0; i < m.rows(); ++i) {
        out << format_double(m(i, j)) << "\n";
      }
    }
  } else {
    out << "# " << m.rows() << " " << m.cols() << "\n";
    for (Index i = 0; i < m.rows(); ++i) {
      for (Index j = 0; j < m.cols(); ++j) {
        if (j > 0) out << ",";
        out << format_double(m(i, j));
      }
      out << "\n";
    }
  }
  if (!out) fail(path, "write failed");
}

ObservationMask read_mask(const fs::path& path) {
  if (!fs::exists(path)) fail(path, "no such file");
  std::ifstream in(path);
  if (!in) fail(path, "cannot open file");
  std::size_t line_no = 0;
  const MmHeader header = read_mm_header(in, path, line_no);
  if (header.format != "coordinate" || header.field != "pattern") {
    fail(path, line_no, "masks use MatrixMarket coordinate pattern format");
  }
  const std::string size_line = next_content_line(in, path, line_no);
  const auto size_tokens = split_whitespace(size_line);
  if (size_tokens.size() != 3) fail(path, line_no, "expected 'rows cols nnz'");
  const long rows = parse_long(size_tokens[0], path, line_no);
  const long cols = parse_long(size_tokens[1], path, line_no);
  const long nnz = parse_long(size_tokens[2], path, line_no);
  if (rows < 1 || cols < 1 || nnz < 0) fail(path, line_no, "bad size header");

  std::vector<std::pair<Index, Index>> pairs;
  pairs.reserve(std::size_t(nnz));
  for (long e = 0; e < nnz; ++e) {
    const std::string entry = next_content_line(in, path, line_no);
    const auto tokens = split_whitespace(entry);
    if (tokens.size() != 2) fail(path, line_no, "expected 'i j'");
    const long i = parse_long(tokens[0], path, line_no);
    const long j = parse_long(tokens[1], path, line_no);
    if (i < 1 || i > rows || j < 1 || j > cols) fail(path, line_no, "index out of bounds");
    pairs.emplace_back(Index(i - 1), Index(j - 1));
  }
  try {
    return ObservationMask(Index(rows), Index(cols), pairs);
  } catch (const ConfigError& err) {
    fail(path, err.what());
  }
}

void write_mask(const ObservationMask& mask, const fs::path& path) {
  std::ofstream out(path);
  if (!out) fail(path, "cannot open file for writing");
  out << "%%MatrixMarket matrix coordinate pattern general\n";
  out << mask.rows() << " " << mask.cols() << " " << mask.count() << "\n";
  for (const auto& [i, j] : mask.index_pairs()) {
    out << (i + 1) << " " << (j + 1) << "\n";
  }
  if (!out) fail(path, "write failed");
}

namespace {

int next_pgm_token(std::istream& in, const fs::path& path) {
  // skip whitespace and '#' comment lines between header fields
  for (;;) {
    const int c = in.peek();
    if (c == EOF) fail(path, "truncated PGM header");
    if (std::isspace(c)) {
      in.get();
      continue;
    }
    if (c == '#') {
      std::string comment;
      std::getline(in, comment);
      continue;
    }
    break;
  }
  int value = 0;
  if (!(in >> value)) fail(path, "malformed PGM header");
  return value;
}

}  // namespace

Matrix read_frame_stack(const fs::path& directory) {
  if (!fs::is_directory(directory)) fail(directory, "not a directory");
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(directory)) {
    if (!entry.is_regular_file()) continue;
    const std::string name = entry.path().filename().string();
    if (!name.empty() && name[0] == '.') continue;
    files.push_back(entry.path());
  }
  if (files.empty()) fail(directory, "no frames found");
  std::sort(files.begin(), files.end(),
            [](const fs::path& a, const fs::path& b) {
              return a.filename().string() < b.filename().string();
            });

  Matrix stack;
  int width = 0, height = 0;
  for (std::size_t f = 0; f < files.size(); ++f) {
    const fs::path& file = files[f];
    std::ifstream in(file, std::ios::binary);
    if (!in) fail(file, "cannot open file");
    char magic[2] = {0, 0};
    in.read(magic, 2);
    if (magic[0] != 'P' || magic[1] != '5') fail(file, "not a binary PGM (P5)");
    const int w = next_pgm_token(in, file);
    const int h = next_pgm_token(in, file);
    const int maxval = next_pgm_token(in, file);
    if (w < 1 || h < 1) fail(file, "bad frame dimensions");
    if (maxval < 1 || maxval > 255) fail(file, "not an 8-bit PGM");
    in.get();  // single whitespace after maxval

    if (f == 0) {
      width = w;
      height = h;
      stack = Matrix(Index(w) * Index(h), Index(files.size()));
    } else if (w != width || h != height) {
      fail(file, "frame size mismatch: expected " + std::to_string(width) + "x" +
                     std::to_string(height) + ", got " + std::to_string(w) + "x" +
                     std::to_string(h));
    }

    std::vector<unsigned char> pixels(std::size_t(w) * std::size_t(h));
    in.read(reinterpret_cast<char*>(pixels.data()), std::streamsize(pixels.size()));
    if (std::size_t(in.gcount()) != pixels.size()) fail(file, "truncated pixel data");
    for (std::size_t p = 0; p < pixels.size(); ++p) {
      stack(Index(p), Index(f)) = double(pixels[p]) / 255.0;
    }
  }
  return stack;
}

void write_table_csv(const Table& table, const fs::path& path) {
  std::ofstream out(path);
  if (!out) fail(path, "cannot open file for writing");
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    if (c > 0) out << ",";
    out << table.columns[c];
  }
  out << "\n";
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c > 0) out << ",";
      out << format_double(row[c]);
    }
    out << "\n";
  }
  if (!out) fail(path, "write failed");
}

}  // namespace feasproj
