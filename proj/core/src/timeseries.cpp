#include "utat/timeseries.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>

#include "utat/errors.hpp"

namespace utat::timeseries {

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Splits a CSV line, remembering the 1-based column where each field starts.
std::vector<std::pair<std::string, long>> split_csv(const std::string& line) {
  std::vector<std::pair<std::string, long>> fields;
  std::string current;
  long start = 1;
  for (std::size_t p = 0; p <= line.size(); ++p) {
    if (p == line.size() || line[p] == ',') {
      fields.emplace_back(current, start);
      current.clear();
      start = static_cast<long>(p) + 2;
    } else {
      current.push_back(line[p]);
    }
  }
  return fields;
}

double parse_double(const std::string& raw, long line_no, long column) {
  const std::string text = trim(raw);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(value)) {
    throw Error("parse-error", "non-numeric value '" + text + "'").at(line_no, column);
  }
  return value;
}

long parse_int(const std::string& raw, long line_no, long column) {
  const std::string text = trim(raw);
  long value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw Error("parse-error", "invalid integer '" + text + "'").at(line_no, column);
  }
  return value;
}

}  // namespace

int TimeSeriesTensor::alternative_index(const std::string& id) const {
  auto it = std::find(alternatives.begin(), alternatives.end(), id);
  return it == alternatives.end() ? -1 : static_cast<int>(it - alternatives.begin());
}

int TimeSeriesTensor::criterion_index(const std::string& id) const {
  for (std::size_t j = 0; j < criteria.size(); ++j)
    if (criteria[j].id == id) return static_cast<int>(j);
  return -1;
}

TimeSeriesTensor load_tensor(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error("parse-error", "empty input").at(1, 1);
  {
    auto header = split_csv(line);
    const char* expected[] = {"alternative", "criterion", "t", "value"};
    if (header.size() != 4) {
      throw Error("parse-error", "expected header alternative,criterion,t,value").at(1, 1);
    }
    for (int f = 0; f < 4; ++f) {
      if (trim(header[f].first) != expected[f]) {
        throw Error("parse-error", "expected header field '" + std::string(expected[f]) + "'")
            .at(1, header[f].second);
      }
    }
  }

  struct Record {
    int alt, crit;
    long t;
    double value;
  };
  std::vector<Record> records;
  std::vector<std::string> alt_order;
  std::vector<std::string> crit_order;
  std::map<std::string, int> alt_index, crit_index;
  long t_max = 0;
  long line_no = 1;

  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto fields = split_csv(line);
    if (fields.size() != 4) {
      throw Error("parse-error", "expected 4 fields, got " + std::to_string(fields.size()))
          .at(line_no, 1);
    }
    const std::string alt = trim(fields[0].first);
    const std::string crit = trim(fields[1].first);
    if (alt.empty()) throw Error("parse-error", "empty alternative id").at(line_no, fields[0].second);
    if (crit.empty()) throw Error("parse-error", "empty criterion id").at(line_no, fields[1].second);
    const long t = parse_int(fields[2].first, line_no, fields[2].second);
    if (t < 1) {
      throw Error("validation-error", "t must be a 1-based index, got " + std::to_string(t))
          .at(line_no, fields[2].second);
    }
    const double value = parse_double(fields[3].first, line_no, fields[3].second);

    auto [ai, alt_new] = alt_index.try_emplace(alt, static_cast<int>(alt_order.size()));
    if (alt_new) alt_order.push_back(alt);
    auto [ci, crit_new] = crit_index.try_emplace(crit, static_cast<int>(crit_order.size()));
    if (crit_new) crit_order.push_back(crit);

    records.push_back({ai->second, ci->second, t, value});
    t_max = std::max(t_max, t);
  }

  if (records.empty()) throw Error("validation-error", "no data records");
  if (t_max < 2) throw Error("validation-error", "need at least 2 time samples, got " +
                                                     std::to_string(t_max));

  TimeSeriesTensor tensor;
  tensor.alternatives = alt_order;
  tensor.criteria.reserve(crit_order.size());
  for (const auto& id : crit_order) tensor.criteria.push_back({id, Direction::maximize});
  tensor.samples = static_cast<int>(t_max);
  tensor.values.assign(alt_order.size() * crit_order.size() * t_max, 0.0);

  std::vector<bool> seen(tensor.values.size(), false);
  for (const auto& r : records) {
    const std::size_t idx =
        (static_cast<std::size_t>(r.alt) * crit_order.size() + r.crit) * t_max + (r.t - 1);
    if (seen[idx]) {
      throw Error("duplicate-cell", "duplicate cell (" + alt_order[r.alt] + ", " +
                                        crit_order[r.crit] + ", t=" + std::to_string(r.t) + ")");
    }
    seen[idx] = true;
    tensor.values[idx] = r.value;
  }
  for (std::size_t i = 0; i < alt_order.size(); ++i) {
    for (std::size_t j = 0; j < crit_order.size(); ++j) {
      for (long t = 1; t <= t_max; ++t) {
        if (!seen[(i * crit_order.size() + j) * t_max + (t - 1)]) {
          throw Error("missing-cell", "missing cell (" + alt_order[i] + ", " + crit_order[j] +
                                          ", t=" + std::to_string(t) + ")");
        }
      }
    }
  }
  return tensor;
}

TimeSeriesTensor load_tensor(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw Error("input-not-found", "cannot open '" + file.string() + "'");
  return load_tensor(in);
}

void set_directions(TimeSeriesTensor& tensor,
                    const std::vector<std::pair<std::string, Direction>>& directions) {
  for (const auto& [id, dir] : directions) {
    const int j = tensor.criterion_index(id);
    if (j < 0) throw Error("validation-error", "direction names unknown criterion '" + id + "'");
    tensor.criteria[j].direction = dir;
  }
}

double mean_measure(std::span<const double> series) {
  if (series.empty()) throw Error("validation-error", "mean of an empty series");
  double sum = 0.0;
  for (double v : series) sum += v;
  return sum / static_cast<double>(series.size());
}

double slope_measure(std::span<const double> series) {
  const std::size_t T = series.size();
  if (T < 2) throw Error("validation-error", "slope needs at least 2 samples");
  // OLS against t = 1..T via centered moments: the time mean is (T+1)/2 and
  // the squared time deviations sum to T(T^2-1)/12.
  const double t_bar = (static_cast<double>(T) + 1.0) / 2.0;
  const double p_bar = mean_measure(series);
  double cross = 0.0;
  for (std::size_t t = 0; t < T; ++t) {
    cross += (series[t] - p_bar) * (static_cast<double>(t + 1) - t_bar);
  }
  const double denom = static_cast<double>(T) * (static_cast<double>(T) * T - 1.0) / 12.0;
  return cross / denom;
}

double last_measure(std::span<const double> series) {
  if (series.empty()) throw Error("validation-error", "last value of an empty series");
  return series.back();
}

double apply_measure(const std::string& id, std::span<const double> series) {
  if (id == "mean") return mean_measure(series);
  if (id == "slope") return slope_measure(series);
  if (id == "last") return last_measure(series);
  throw Error("unknown-measure", "unknown measure '" + id + "' (known: mean, slope, last)");
}

ScaleGrid build_scale(std::vector<double> values, const ScalePolicy& policy) {
  if (values.empty()) throw Error("degenerate-scale", "no values to build a scale from");
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  if (values.size() < 2) {
    throw Error("degenerate-scale", "fewer than 2 distinct values (all equal to " +
                                        std::to_string(values.front()) + ")");
  }

  ScaleGrid grid;
  grid.policy = policy;
  if (policy.kind == ScalePolicy::Kind::observed_values) {
    grid.breakpoints = std::move(values);
  } else {
    if (policy.alpha < 2) throw Error("validation-error", "equal-interval scale needs alpha >= 2");
    const double lo = values.front(), hi = values.back();
    grid.breakpoints.resize(policy.alpha);
    for (int i = 0; i < policy.alpha; ++i) {
      grid.breakpoints[i] = lo + (hi - lo) * static_cast<double>(i) / (policy.alpha - 1);
    }
    grid.breakpoints.back() = hi;  // pin the top against rounding drift
  }
  return grid;
}

std::pair<int, double> locate(const ScaleGrid& grid, double x) {
  const auto& c = grid.breakpoints;
  if (x < c.front() || x > c.back()) {
    std::ostringstream msg;
    msg << "value " << x << " outside scale range [" << c.front() << ", " << c.back() << "]";
    throw Error("out-of-range", msg.str());
  }
  const int alpha = static_cast<int>(c.size());
  for (int l = 0; l < alpha - 1; ++l) {
    if (x <= c[l + 1]) {
      double theta = (x - c[l]) / (c[l + 1] - c[l]);
      theta = std::clamp(theta, 0.0, 1.0);
      return {l + 1, theta};
    }
  }
  return {alpha - 1, 1.0};  // x == c.back() up to the comparison above
}

int MeasureTensor::alternative_index(const std::string& id) const {
  auto it = std::find(alternatives.begin(), alternatives.end(), id);
  return it == alternatives.end() ? -1 : static_cast<int>(it - alternatives.begin());
}

int MeasureTensor::criterion_index(const std::string& id) const {
  for (std::size_t j = 0; j < criteria.size(); ++j)
    if (criteria[j].id == id) return static_cast<int>(j);
  return -1;
}

MeasureTensor extract_measures(const TimeSeriesTensor& tensor,
                               const std::vector<std::string>& measures,
                               const ScalePolicy& policy) {
  if (measures.empty()) throw Error("validation-error", "no measures requested");

  MeasureTensor out;
  out.measures = measures;
  out.alternatives = tensor.alternatives;
  out.criteria = tensor.criteria;
  out.policy = policy;
  const int m = tensor.m(), n = tensor.n(), h = static_cast<int>(measures.size());
  out.values.assign(static_cast<std::size_t>(m) * n * h, 0.0);

  std::vector<double> buffer(tensor.samples);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) {
      auto series = tensor.series(i, j);
      std::span<const double> view = series;
      if (tensor.criteria[j].direction == Direction::minimize) {
        for (int t = 0; t < tensor.samples; ++t) buffer[t] = -series[t];
        view = buffer;
      }
      for (int k = 0; k < h; ++k) out.at(i, j, k) = apply_measure(measures[k], view);
    }
  }

  out.scales.resize(h);
  for (int k = 0; k < h; ++k) {
    out.scales[k].resize(n);
    for (int j = 0; j < n; ++j) {
      std::vector<double> column(m);
      for (int i = 0; i < m; ++i) column[i] = out.at(i, j, k);
      try {
        out.scales[k][j] = build_scale(std::move(column), policy);
      } catch (Error& e) {
        if (e.code == "degenerate-scale") {
          throw Error("degenerate-scale", "measure '" + measures[k] + "' on criterion '" +
                                              tensor.criteria[j].id + "': " + e.what());
        }
        throw;
      }
    }
  }
  return out;
}

}  // namespace utat::timeseries
