#include "aggcast/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace aggcast {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  fields.push_back(cur);
  return fields;
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

std::optional<double> parse_double(const std::string& s) {
  const std::string t = trim(s);
  if (t.empty() || t == "NA" || t == "NaN" || t == "nan" || t == "null") {
    return std::nullopt;
  }
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (end != t.c_str() + t.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

}  // namespace

ColumnMap ColumnMap::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open column map: " + path);
  ColumnMap m;
  std::string line;
  while (std::getline(in, line)) {
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw std::runtime_error("column map line without '=': " + t);
    }
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (key == "date") {
      m.date = value;
    } else if (key == "station") {
      m.station = value;
    } else if (key == "lead_time") {
      m.lead_time = value;
    } else if (key == "obs") {
      m.obs = value;
    } else if (key == "experts") {
      m.experts.clear();
      for (const auto& name : split_csv_line(value)) {
        if (!trim(name).empty()) m.experts.push_back(trim(name));
      }
    } else {
      throw std::runtime_error("unknown column map key: " + key);
    }
  }
  return m;
}

std::map<StreamKey, ForecastPanel> parse_forecast_csv(const std::string& path,
                                                      ParseStats* stats,
                                                      const ColumnMap* columns) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open input: " + path);
  const ColumnMap defaults;
  const ColumnMap& cm = columns != nullptr ? *columns : defaults;

  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty file: " + path);
  const auto header = split_csv_line(line);

  auto find_col = [&](const std::string& name) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) {
      throw std::runtime_error("malformed header: missing column '" + name +
                               "' in " + path);
    }
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t date_col = find_col(cm.date);
  const std::size_t station_col = find_col(cm.station);
  const std::size_t lead_col = find_col(cm.lead_time);
  const std::size_t obs_col = find_col(cm.obs);

  std::vector<std::size_t> expert_cols;
  std::vector<std::string> expert_names;
  if (!cm.experts.empty()) {
    for (const auto& name : cm.experts) {
      expert_cols.push_back(find_col(name));
      expert_names.push_back(name);
    }
  } else {
    for (std::size_t c = 0; c < header.size(); ++c) {
      if (c == date_col || c == station_col || c == lead_col || c == obs_col) {
        continue;
      }
      expert_cols.push_back(c);
      expert_names.push_back(trim(header[c]));
    }
  }
  if (expert_cols.empty()) {
    throw std::runtime_error("malformed header: no expert columns in " + path);
  }

  std::map<StreamKey, ForecastPanel> panels;
  std::set<std::pair<StreamKey, std::string>> seen;
  ParseStats local;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    ++local.total_rows;
    const auto fields = split_csv_line(line);
    if (fields.size() != header.size()) {
      throw std::runtime_error("line " + std::to_string(line_no) +
                               ": wrong field count");
    }
    StreamKey key;
    key.station_id = trim(fields[station_col]);
    int lead = 0;
    const std::string lead_s = trim(fields[lead_col]);
    const auto [p, ec] =
        std::from_chars(lead_s.data(), lead_s.data() + lead_s.size(), lead);
    if (ec != std::errc{} || p != lead_s.data() + lead_s.size() || lead <= 0) {
      throw std::runtime_error("line " + std::to_string(line_no) +
                               ": bad lead_time '" + lead_s + "'");
    }
    key.lead_time_hours = lead;

    PanelRow row;
    row.date = trim(fields[date_col]);
    if (!seen.insert({key, row.date}).second) {
      throw std::runtime_error("line " + std::to_string(line_no) +
                               ": duplicate date " + row.date + " for stream " +
                               key.label());
    }

    bool ok = true;
    const auto obs = parse_double(fields[obs_col]);
    if (!obs) ok = false;
    row.experts.reserve(expert_cols.size());
    for (std::size_t c : expert_cols) {
      const auto v = parse_double(fields[c]);
      if (!v) {
        ok = false;
        break;
      }
      row.experts.push_back(*v);
    }
    if (!ok) {
      ++local.dropped_rows;
      continue;
    }
    row.obs = *obs;

    auto& panel = panels[key];
    if (panel.expert_names.empty()) panel.expert_names = expert_names;
    panel.rows.push_back(std::move(row));
  }

  for (auto it = panels.begin(); it != panels.end();) {
    if (it->second.rows.empty()) {
      it = panels.erase(it);
      continue;
    }
    std::sort(it->second.rows.begin(), it->second.rows.end(),
              [](const PanelRow& a, const PanelRow& b) {
                return a.date < b.date;
              });
    it->second.validate();
    ++it;
  }
  if (panels.empty()) {
    throw std::runtime_error("no usable rows in " + path);
  }
  if (stats != nullptr) *stats = local;
  return panels;
}

void write_panel_csv(const std::string& path,
                     const std::map<StreamKey, ForecastPanel>& panels) {
  if (panels.empty()) throw std::invalid_argument("no panels to write");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write: " + path);
  const auto& names = panels.begin()->second.expert_names;
  out << "date,station_id,lead_time,obs";
  for (const auto& n : names) out << ',' << n;
  out << '\n';
  out.precision(17);
  for (const auto& [key, panel] : panels) {
    if (panel.expert_names != names) {
      throw std::invalid_argument("panels with differing expert sets");
    }
    for (const auto& row : panel.rows) {
      out << row.date << ',' << key.station_id << ',' << key.lead_time_hours
          << ',' << row.obs;
      for (double x : row.experts) out << ',' << x;
      out << '\n';
    }
  }
}

bool glob_match(const std::string& pattern, const std::string& text) {
  std::size_t p = 0, t = 0;
  std::size_t star = std::string::npos, mark = 0;
  while (t < text.size()) {
    if (p < pattern.size() &&
        (pattern[p] == '?' || pattern[p] == text[t])) {
      ++p;
      ++t;
    } else if (p < pattern.size() && pattern[p] == '*') {
      star = p++;
      mark = t;
    } else if (star != std::string::npos) {
      p = star + 1;
      t = ++mark;
    } else {
      return false;
    }
  }
  while (p < pattern.size() && pattern[p] == '*') ++p;
  return p == pattern.size();
}

}  // namespace aggcast
