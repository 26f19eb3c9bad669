#include "topc/io.hpp"

#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <stdexcept>
#include <unordered_set>

namespace topc::io {
namespace {

[[noreturn]] void fail(const std::string& path, std::size_t line,
                       std::size_t col, const std::string& msg) {
  throw std::runtime_error(path + ":" + std::to_string(line) + ":" +
                           std::to_string(col) + ": " + msg);
}

std::ifstream open_or_throw(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path + ": cannot open file");
  return in;
}

struct Field {
  std::string text;
  std::size_t col;  // 1-based column of the field start
};

std::vector<Field> split_csv(const std::string& line) {
  std::vector<Field> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    const std::size_t end = comma == std::string::npos ? line.size() : comma;
    std::size_t a = start;
    std::size_t b = end;
    while (a < b && std::isspace(static_cast<unsigned char>(line[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(line[b - 1]))) --b;
    out.push_back({line.substr(a, b - a), a + 1});
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

double parse_number(const Field& f, const std::string& path,
                    std::size_t line) {
  if (f.text.empty()) fail(path, line, f.col, "empty field, expected a number");
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(f.text.c_str(), &end);
  if (end != f.text.c_str() + f.text.size())
    fail(path, line, f.col, "expected a number, got '" + f.text + "'");
  if (errno == ERANGE || !std::isfinite(v))
    fail(path, line, f.col, "number out of range: '" + f.text + "'");
  return v;
}

bool is_blank_or_comment(const std::string& line) {
  for (char ch : line) {
    if (std::isspace(static_cast<unsigned char>(ch))) continue;
    return ch == '#';
  }
  return true;
}

std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

MetaFeatureSet read_features_csv(const std::string& path) {
  std::ifstream in = open_or_throw(path);
  std::string line;
  if (!std::getline(in, line)) fail(path, 1, 1, "empty file, expected header");
  const auto header = split_csv(strip_cr(line));
  if (header.size() < 2 || header[0].text != "category")
    fail(path, 1, 1, "expected header 'category,<f0>,...'");
  const std::size_t dim = header.size() - 1;
  MetaFeatureSet x;
  std::unordered_set<std::string> seen;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    line = strip_cr(line);
    if (line.empty()) continue;
    const auto fields = split_csv(line);
    if (fields.size() != dim + 1)
      fail(path, lineno, 1,
           "expected " + std::to_string(dim + 1) + " fields, got " +
               std::to_string(fields.size()));
    if (fields[0].text.empty())
      fail(path, lineno, fields[0].col, "empty category name");
    if (!seen.insert(fields[0].text).second)
      fail(path, lineno, fields[0].col,
           "duplicate category '" + fields[0].text + "'");
    std::vector<double> row(dim);
    for (std::size_t f = 0; f < dim; ++f)
      row[f] = parse_number(fields[f + 1], path, lineno);
    x.categories.push_back(fields[0].text);
    x.features.push_back(std::move(row));
  }
  if (x.categories.empty()) fail(path, lineno + 1, 1, "no feature rows");
  return x;
}

void write_features_csv(const std::string& path, const MetaFeatureSet& x) {
  validate_features(x);
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path + ": cannot write file");
  out << "category";
  for (std::size_t f = 0; f < x.features.front().size(); ++f)
    out << ",f" << f;
  out << "\n";
  for (std::size_t i = 0; i < x.categories.size(); ++i) {
    out << x.categories[i];
    for (double v : x.features[i]) out << "," << fmt17(v);
    out << "\n";
  }
  if (!out) throw std::runtime_error(path + ": write failed");
}

GroupingTable read_grouping(const std::string& path) {
  std::ifstream in = open_or_throw(path);
  GroupingTable t;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = strip_cr(line);
    if (is_blank_or_comment(line)) continue;
    std::vector<std::string> group;
    for (const auto& f : split_csv(line)) {
      if (f.text.empty()) fail(path, lineno, f.col, "empty category name");
      group.push_back(f.text);
    }
    t.groups.push_back(std::move(group));
  }
  if (t.groups.empty())
    throw std::runtime_error(path + ": no groups found");
  return t;
}

ClassScores read_scores(const std::string& path) {
  std::ifstream in = open_or_throw(path);
  std::string line;
  if (!std::getline(in, line))
    fail(path, 1, 1, "empty file, expected 'true_label=<index>'");
  line = strip_cr(line);
  const std::string prefix = "true_label=";
  if (line.rfind(prefix, 0) != 0)
    fail(path, 1, 1, "expected 'true_label=<index>'");
  const std::string value = line.substr(prefix.size());
  errno = 0;
  char* end = nullptr;
  const unsigned long label = std::strtoul(value.c_str(), &end, 10);
  if (value.empty() || end != value.c_str() + value.size() || errno == ERANGE)
    fail(path, 1, prefix.size() + 1,
         "expected a nonnegative integer, got '" + value + "'");
  if (!std::getline(in, line))
    fail(path, 2, 1, "expected a line of comma-separated scores");
  line = strip_cr(line);
  ClassScores s;
  s.true_label = static_cast<std::size_t>(label);
  for (const auto& f : split_csv(line))
    s.scores.push_back(parse_number(f, path, 2));
  return s;
}

ApTable read_ap_csv(const std::string& path) {
  std::ifstream in = open_or_throw(path);
  ApTable table;
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = strip_cr(line);
    if (is_blank_or_comment(line)) continue;
    const auto fields = split_csv(line);
    if (fields.size() != 2)
      fail(path, lineno, 1, "expected 'name,value'");
    if (fields[0].text.empty())
      fail(path, lineno, fields[0].col, "empty class name");
    if (!seen.insert(fields[0].text).second)
      fail(path, lineno, fields[0].col,
           "duplicate class '" + fields[0].text + "'");
    const double v = parse_number(fields[1], path, lineno);
    if (!(v >= 0.0 && v <= 100.0))
      fail(path, lineno, fields[1].col, "AP must lie in [0,100]");
    table.names.push_back(fields[0].text);
    table.values.push_back(v);
  }
  if (table.names.empty())
    throw std::runtime_error(path + ": empty AP table");
  return table;
}

}  // namespace topc::io
