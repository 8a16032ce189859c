#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "qbattery/experiment.hpp"

namespace qbattery {

namespace {

constexpr const char* kDegenerate = "DEGEN";
constexpr const char* kRunPrefix = "run:";

std::string quote_field(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

void append_record(std::string& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out += ',';
    out += quote_field(fields[i]);
  }
  out += "\r\n";
}

// Splits CSV records starting at `pos`; handles quoted fields spanning lines.
std::vector<std::vector<std::string>> parse_records(const std::string& text, std::size_t pos) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool quoted = false;
  bool any = false;
  auto end_record = [&] {
    record.push_back(field);
    records.push_back(record);
    record.clear();
    field.clear();
    any = false;
  };
  for (std::size_t i = pos; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    if (c == '"') {
      quoted = true;
      any = true;
    } else if (c == ',') {
      record.push_back(field);
      field.clear();
      any = true;
    } else if (c == '\r' || c == '\n') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      if (any || !field.empty()) end_record();
    } else {
      field += c;
      any = true;
    }
  }
  if (quoted) throw std::invalid_argument("csv: unterminated quoted field");
  if (any || !field.empty()) end_record();
  return records;
}

double parse_number(const std::string& s) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) {
    throw std::invalid_argument("csv: bad number '" + s + "'");
  }
  return v;
}

std::string run_line(const SweepResult& r) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "# %s workers = %d, wall_time_s = %.3f\r\n", kRunPrefix, r.workers,
                r.wall_seconds);
  return buf;
}

std::string plot_script(const SweepResult& result, const std::string& csv_name) {
  const std::size_t n_ranges = result.n_parameter_columns;
  const std::size_t first_metric = result.columns.size() - experiment_info(result.experiment).metrics.size();
  std::ostringstream gp;
  gp << "set datafile separator ','\n"
     << "set datafile commentschars '#'\n"
     << "set key autotitle columnhead\n"
     << "set title '" << to_string(result.experiment) << "' noenhanced\n"
     << "data = '" << csv_name << "'\n";
  if (n_ranges >= 2) {
    // Map of the last metric over the first two parameters.
    gp << "set view map\n"
       << "set xlabel '" << result.columns[1] << "' noenhanced\n"
       << "set ylabel '" << result.columns[0] << "' noenhanced\n"
       << "set cblabel '" << result.columns.back() << "' noenhanced\n"
       << "splot data using 2:1:" << result.columns.size() << " with points pointtype 5 palette\n";
  } else {
    gp << "set xlabel '" << result.columns[0] << "' noenhanced\n"
       << "plot ";
    for (std::size_t c = first_metric; c < result.columns.size(); ++c) {
      if (c != first_metric) gp << ", \\\n     ";
      gp << "data using 1:" << c + 1 << " with linespoints";
    }
    gp << "\n";
  }
  gp << "pause mouse close\n";
  return gp.str();
}

}  // namespace

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string render_csv(const SweepResult& result) {
  std::string out;
  for (const auto& m : result.metadata) out += "# " + m + "\r\n";
  out += run_line(result);
  append_record(out, result.columns);
  const std::size_t first_metric =
      result.columns.size() - experiment_info(result.experiment).metrics.size();
  std::vector<std::string> fields;
  for (const auto& row : result.rows) {
    if (row.values.size() != result.columns.size()) {
      throw std::logic_error("render_csv: row width does not match header");
    }
    fields.clear();
    for (std::size_t c = 0; c < row.values.size(); ++c) {
      fields.push_back(row.degenerate && c >= first_metric ? std::string(kDegenerate)
                                                           : format_number(row.values[c]));
    }
    append_record(out, fields);
  }
  return out;
}

std::string emit_outputs(const SweepResult& result, const std::string& path, bool plot) {
  namespace fs = std::filesystem;
  const fs::path csv_path(path);
  if (csv_path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(csv_path.parent_path(), ec);
  }
  {
    std::ofstream out(csv_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << render_csv(result);
    if (!out) throw std::runtime_error("write failed for '" + path + "'");
  }
  if (!plot) return {};
  fs::path gp_path = csv_path;
  gp_path.replace_extension(".gp");
  std::ofstream gp(gp_path, std::ios::binary);
  if (!gp) throw std::runtime_error("cannot write '" + gp_path.string() + "'");
  gp << plot_script(result, csv_path.filename().string());
  if (!gp) throw std::runtime_error("write failed for '" + gp_path.string() + "'");
  return gp_path.string();
}

SweepResult parse_csv(const std::string& text) {
  SweepResult r;
  bool have_experiment = false;
  std::size_t pos = 0;
  while (pos < text.size() && text[pos] == '#') {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string::npos) eol = text.size();
    std::string line = text.substr(pos, eol - pos);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    line = line.substr(line.size() > 1 && line[1] == ' ' ? 2 : 1);
    if (line.rfind(kRunPrefix, 0) == 0) {
      std::sscanf(line.c_str(), "run: workers = %d, wall_time_s = %lf", &r.workers,
                  &r.wall_seconds);
    } else {
      if (line.rfind("experiment = ", 0) == 0) {
        r.experiment = parse_experiment(line.substr(13));
        have_experiment = true;
      }
      r.metadata.push_back(line);
    }
    pos = eol + 1;
  }
  if (!have_experiment) throw std::invalid_argument("csv: no experiment in metadata");
  auto records = parse_records(text, pos);
  if (records.empty()) throw std::invalid_argument("csv: missing header row");
  r.columns = records.front();
  const std::size_t n_metrics = experiment_info(r.experiment).metrics.size();
  if (r.columns.size() < n_metrics) throw std::invalid_argument("csv: header too short");
  const std::size_t first_metric = r.columns.size() - n_metrics;
  r.n_parameter_columns = first_metric - experiment_info(r.experiment).derived.size();
  for (std::size_t i = 1; i < records.size(); ++i) {
    const auto& rec = records[i];
    if (rec.size() != r.columns.size()) {
      throw std::invalid_argument("csv: row " + std::to_string(i) + " has " +
                                  std::to_string(rec.size()) + " fields, expected " +
                                  std::to_string(r.columns.size()));
    }
    SweepRow row;
    for (std::size_t c = 0; c < rec.size(); ++c) {
      if (rec[c] == kDegenerate && c >= first_metric) {
        row.degenerate = true;
        row.values.push_back(std::numeric_limits<double>::quiet_NaN());
      } else {
        row.values.push_back(parse_number(rec[c]));
      }
    }
    r.rows.push_back(std::move(row));
  }
  return r;
}

SweepResult read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_csv(ss.str());
}

std::string csv_body(const std::string& csv_text) {
  std::string out;
  std::size_t pos = 0;
  while (pos < csv_text.size()) {
    std::size_t eol = csv_text.find('\n', pos);
    eol = eol == std::string::npos ? csv_text.size() : eol + 1;
    const std::string line = csv_text.substr(pos, eol - pos);
    if (line.rfind(std::string("# ") + kRunPrefix, 0) != 0) out += line;
    pos = eol;
  }
  return out;
}

}  // namespace qbattery
