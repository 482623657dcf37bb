#include "agentrec/catalog.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "agentrec/context_model.hpp"
#include "agentrec/errors.hpp"

namespace agentrec {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(s);
  while (std::getline(in, field, sep)) out.push_back(field);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

double parse_number(const std::string& s, std::size_t line_no) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw InvalidConfig("catalog line " + std::to_string(line_no) + ": bad number '" + s + "'");
  }
}

std::vector<double> parse_vector(const std::string& s, std::size_t line_no) {
  std::vector<double> out;
  for (const auto& part : split(s, ',')) out.push_back(parse_number(part, line_no));
  return out;
}

void append_number(std::string& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out += buf;
}

}  // namespace

void validate_catalog(const std::vector<Candidate>& items) {
  std::unordered_set<std::string> ids;
  const std::size_t dim = items.empty() ? 0 : items.front().attributes.size();
  for (const auto& c : items) {
    if (!ids.insert(c.item_id).second) throw InvalidConfig("duplicate item id " + c.item_id);
    if (c.attributes.size() != dim) throw InvalidConfig("item " + c.item_id + " has ragged attributes");
    if (c.context_affinity.size() != kContextDim) {
      throw InvalidConfig("item " + c.item_id + " needs " + std::to_string(kContextDim) + " context values");
    }
    if (!math::all_finite(c.attributes) || !math::all_finite(c.context_affinity) ||
        !std::isfinite(c.popularity) || !std::isfinite(c.novelty)) {
      throw InvalidConfig("item " + c.item_id + " has non-finite values");
    }
  }
}

std::vector<Candidate> parse_catalog(std::string_view text) {
  std::vector<Candidate> items;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const auto fields = split(line, '\t');
    if (fields.size() != 6) {
      throw InvalidConfig("catalog line " + std::to_string(line_no) + ": expected 6 tab-separated fields");
    }
    Candidate c;
    c.item_id = fields[0];
    c.name = fields[1];
    c.attributes = parse_vector(fields[2], line_no);
    c.context_affinity = parse_vector(fields[3], line_no);
    c.popularity = parse_number(fields[4], line_no);
    c.novelty = parse_number(fields[5], line_no);
    items.push_back(std::move(c));
  }
  validate_catalog(items);
  return items;
}

std::vector<Candidate> load_catalog(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw NotFound("catalog file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_catalog(buf.str());
}

std::string format_catalog(const std::vector<Candidate>& items) {
  std::string out =
      "# item_id\tname\tattributes\tcontext_affinity\tpopularity\tnovelty\n";
  for (const auto& c : items) {
    out += c.item_id;
    out += '\t';
    out += c.name;
    out += '\t';
    for (std::size_t i = 0; i < c.attributes.size(); ++i) {
      if (i) out += ',';
      append_number(out, c.attributes[i]);
    }
    out += '\t';
    for (std::size_t i = 0; i < c.context_affinity.size(); ++i) {
      if (i) out += ',';
      append_number(out, c.context_affinity[i]);
    }
    out += '\t';
    append_number(out, c.popularity);
    out += '\t';
    append_number(out, c.novelty);
    out += '\n';
  }
  return out;
}

void save_catalog(const std::vector<Candidate>& items, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw InvalidConfig("cannot write catalog " + path.string());
  out << format_catalog(items);
}

}  // namespace agentrec
