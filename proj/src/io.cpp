#include "surftest/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>

namespace surftest::io {

namespace {

std::string_view trim(std::string_view v) {
  while (!v.empty() && (v.front() == ' ' || v.front() == '\t')) v.remove_prefix(1);
  while (!v.empty() && (v.back() == ' ' || v.back() == '\t' || v.back() == '\r')) v.remove_suffix(1);
  return v;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

double parse_number(std::string_view field, const char* what, const std::string& where) {
  double v = 0.0;
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || ptr != field.data() + field.size() || field.empty()) {
    throw ValidationError(where + ": non-numeric " + what + " '" + std::string(field) + "'");
  }
  if (!std::isfinite(v)) {
    throw ValidationError(where + ": non-finite " + what + " '" + std::string(field) + "'");
  }
  return v;
}

Grid build_grid(std::vector<double> coords, const char* axis, const std::string& source) {
  std::sort(coords.begin(), coords.end());
  coords.erase(std::unique(coords.begin(), coords.end()), coords.end());
  try {
    return Grid(std::move(coords));
  } catch (const ValidationError& e) {
    throw ValidationError(source + ": " + axis + "-axis " + e.what());
  }
}

std::size_t rank_of(const std::vector<double>& sorted, double v) {
  return static_cast<std::size_t>(std::lower_bound(sorted.begin(), sorted.end(), v) -
                                  sorted.begin());
}

struct Row {
  std::size_t unit;
  double s;
  double t;
  double value;
  std::size_t line;
};

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

FunctionalSample read_csv(std::istream& in, const std::string& source) {
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split(line);
    if (fields.size() != 4 || fields[0] != "unit" || fields[1] != "s" || fields[2] != "t" ||
        fields[3] != "value") {
      throw ValidationError(source + ":" + std::to_string(line_no) +
                            ": expected header 'unit,s,t,value'");
    }
    have_header = true;
    break;
  }
  if (!have_header) throw ValidationError(source + ": empty file, expected header 'unit,s,t,value'");

  std::vector<std::string> units;
  std::unordered_map<std::string, std::size_t> unit_index;
  std::vector<Row> rows;
  std::vector<double> s_coords, t_coords;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const std::string where = source + ":" + std::to_string(line_no);
    const auto fields = split(line);
    if (fields.size() != 4) {
      throw ValidationError(where + ": expected 4 fields, got " + std::to_string(fields.size()));
    }
    if (fields[0].empty()) throw ValidationError(where + ": empty unit");
    const std::string unit(fields[0]);
    auto [it, inserted] = unit_index.try_emplace(unit, units.size());
    if (inserted) units.push_back(unit);
    const std::string at = where + " (unit " + unit + ", s=" + std::string(fields[1]) +
                           ", t=" + std::string(fields[2]) + ")";
    Row row{it->second, parse_number(fields[1], "s", at), parse_number(fields[2], "t", at), 0.0,
            line_no};
    row.value = parse_number(fields[3], "value", at);
    s_coords.push_back(row.s);
    t_coords.push_back(row.t);
    rows.push_back(row);
  }
  if (rows.empty()) throw ValidationError(source + ": no data rows");

  const Grid grid_s = build_grid(std::move(s_coords), "s", source);
  const Grid grid_t = build_grid(std::move(t_coords), "t", source);
  const std::size_t N = grid_s.size(), M = grid_t.size();
  const std::size_t cell = N * M;
  std::vector<double> values(units.size() * cell, 0.0);
  std::vector<std::size_t> seen_line(units.size() * cell, 0);
  for (const Row& r : rows) {
    const std::size_t idx = r.unit * cell + rank_of(grid_s.points(), r.s) * M +
                            rank_of(grid_t.points(), r.t);
    if (seen_line[idx] != 0) {
      std::ostringstream msg;
      msg << source << ":" << r.line << ": duplicate cell at unit " << units[r.unit]
          << " (s=" << format_double(r.s) << ", t=" << format_double(r.t)
          << "), first seen on line " << seen_line[idx];
      throw ValidationError(msg.str());
    }
    seen_line[idx] = r.line;
    values[idx] = r.value;
  }
  for (std::size_t idx = 0; idx < seen_line.size(); ++idx) {
    if (seen_line[idx] == 0) {
      const std::size_t u = idx / cell;
      std::ostringstream msg;
      msg << source << ": incomplete grid at unit " << units[u] << ": missing (s="
          << format_double(grid_s[(idx % cell) / M]) << ", t=" << format_double(grid_t[idx % M])
          << ")";
      throw ValidationError(msg.str());
    }
  }
  return FunctionalSample(std::move(values), grid_s, grid_t, source);
}

FunctionalSample ingest_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  return read_csv(in, path.string());
}

void write_csv(const FunctionalSample& sample, std::ostream& out,
               const std::vector<std::string>& units) {
  if (!units.empty() && units.size() != sample.n()) {
    throw ValidationError("unit name count does not match the sample size");
  }
  std::vector<std::string> s_text, t_text;
  for (double s : sample.grid_s().points()) s_text.push_back(format_double(s));
  for (double t : sample.grid_t().points()) t_text.push_back(format_double(t));
  out << "unit,s,t,value\n";
  for (std::size_t i = 0; i < sample.n(); ++i) {
    const std::string unit = units.empty() ? std::to_string(i + 1) : units[i];
    for (std::size_t l1 = 0; l1 < sample.N(); ++l1)
      for (std::size_t l2 = 0; l2 < sample.M(); ++l2)
        out << unit << ',' << s_text[l1] << ',' << t_text[l2] << ','
            << format_double(sample(i, l1, l2)) << '\n';
  }
}

void emit_csv(const FunctionalSample& sample, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path.string());
  write_csv(sample, out);
}

FunctionalSample log_transform(const FunctionalSample& sample) {
  std::vector<double> out(sample.values().begin(), sample.values().end());
  for (std::size_t i = 0; i < sample.n(); ++i)
    for (std::size_t l1 = 0; l1 < sample.N(); ++l1)
      for (std::size_t l2 = 0; l2 < sample.M(); ++l2) {
        const double v = sample(i, l1, l2);
        if (v < 0.0) {
          std::ostringstream msg;
          msg << "log10(y+1) needs nonnegative data: value " << format_double(v)
              << " at replicate " << i + 1 << " (s=" << format_double(sample.grid_s()[l1])
              << ", t=" << format_double(sample.grid_t()[l2]) << ")";
          throw ValidationError(msg.str());
        }
        out[(i * sample.N() + l1) * sample.M() + l2] = std::log10(v + 1.0);
      }
  return FunctionalSample(std::move(out), sample.grid_s(), sample.grid_t(), sample.label());
}

void write_surface_csv(const Surface& surface, const Grid& grid_s, const Grid& grid_t,
                       std::ostream& out) {
  out << "s,t,value\n";
  for (std::size_t l1 = 0; l1 < surface.rows; ++l1)
    for (std::size_t l2 = 0; l2 < surface.cols; ++l2)
      out << format_double(grid_s[l1]) << ',' << format_double(grid_t[l2]) << ','
          << format_double(surface(l1, l2)) << '\n';
}

nlohmann::json to_json(const TestReport& report) {
  nlohmann::json components = nlohmann::json::array();
  for (const auto& term : report.per_component) {
    nlohmann::json c{{"j", term.j},
                     {"score_difference", term.score_difference},
                     {"pooled_variance", term.pooled_variance}};
    if (term.k) c["k"] = *term.k;
    components.push_back(std::move(c));
  }
  nlohmann::json out{{"statistic", report.statistic},
                     {"df", report.df},
                     {"p_value", report.p_value},
                     {"J", report.J},
                     {"K", report.K},
                     {"per_component", std::move(components)},
                     {"warnings", report.warnings}};
  if (report.slice) {
    out["slice"] = {{"fixed_axis", std::string(1, report.slice->fixed_axis)},
                    {"index", report.slice->index},
                    {"coordinate", report.slice->coordinate}};
  }
  return out;
}

nlohmann::json sweep_to_json(const std::vector<TestReport>& reports) {
  std::vector<const TestReport*> ordered;
  for (const auto& r : reports) ordered.push_back(&r);
  std::stable_sort(ordered.begin(), ordered.end(), [](const TestReport* a, const TestReport* b) {
    return a->slice && b->slice && a->slice->coordinate < b->slice->coordinate;
  });
  nlohmann::json slices = nlohmann::json::array();
  std::vector<std::string> warnings;
  for (const TestReport* r : ordered) {
    slices.push_back(to_json(*r));
    for (const auto& w : r->warnings)
      if (std::find(warnings.begin(), warnings.end(), w) == warnings.end()) warnings.push_back(w);
  }
  return nlohmann::json{{"statistic", nullptr},
                        {"df", nullptr},
                        {"p_value", nullptr},
                        {"J", reports.empty() ? 0 : reports.front().J},
                        {"K", nlohmann::json::array()},
                        {"per_component", nlohmann::json::array()},
                        {"warnings", warnings},
                        {"fixed_axis", reports.empty() || !reports.front().slice
                                           ? std::string("t")
                                           : std::string(1, reports.front().slice->fixed_axis)},
                        {"slices", std::move(slices)}};
}

nlohmann::json to_json(const SimConfig& config) {
  nlohmann::json out{{"example", config.example}, {"n1", config.n1},       {"n2", config.n2},
                     {"delta", config.delta},     {"reps", config.reps},   {"level", config.level},
                     {"N", config.N},             {"M", config.M},         {"seed", config.seed},
                     {"q", config.q}};
  out["mode"] = config.profile_index ? "profile:" + std::to_string(*config.profile_index)
                                     : std::string("globe");
  return out;
}

nlohmann::json to_json(const SimReport& report) {
  nlohmann::json hist = nlohmann::json::object();
  for (const auto& [df, count] : report.df_histogram) hist[std::to_string(df)] = count;
  return nlohmann::json{{"rejection_rate", report.rejection_rate},
                        {"rejections", report.rejections},
                        {"reps", report.reps},
                        {"wilson_ci_95", {report.wilson_ci_95.first, report.wilson_ci_95.second}},
                        {"df_histogram", std::move(hist)},
                        {"mean_statistic", report.mean_statistic}};
}

}  // namespace surftest::io
