#include "hei/trace_io.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "hei/errors.hpp"

namespace hei {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (const char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

double field_or_nan(const std::string& s) { return s.empty() ? kNaN : parse_double(s); }

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& text) {
  std::size_t b = 0;
  std::size_t e = text.size();
  while (b < e && std::isspace(static_cast<unsigned char>(text[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(text[e - 1]))) --e;
  if (b < e && text[b] == '+') ++b;
  if (b == e) throw ArgumentError("expected a number, got an empty field");
  double v = 0.0;
  const auto res = std::from_chars(text.data() + b, text.data() + e, v);
  if (res.ec != std::errc() || res.ptr != text.data() + e) {
    throw ArgumentError("not a number: '" + text + "'");
  }
  return v;
}

std::string trace_csv_header(int dim) {
  std::ostringstream h;
  h << "run_id,method,iteration";
  for (int j = 1; j <= dim; ++j) h << ",x_" << j;
  h << ",y,best_y,gap,s_next,s_max_est,a,b";
  for (int j = 1; j <= dim; ++j) h << ",theta_" << j;
  return h.str();
}

void write_trace_rows(std::ostream& out, const RunTrace& trace, int run_id) {
  for (const auto& r : trace.records) {
    out << run_id << ',' << trace.method_name << ',' << r.iteration;
    for (Eigen::Index j = 0; j < r.x.size(); ++j) out << ',' << format_double(r.x[j]);
    const double gap = trace.f_min ? r.best_y - *trace.f_min : kNaN;
    out << ',' << format_double(r.y) << ',' << format_double(r.best_y) << ','
        << format_double(gap) << ',' << format_double(r.s_next) << ','
        << format_double(r.s_max_est) << ',' << format_double(r.a) << ',' << format_double(r.b);
    for (int j = 0; j < trace.dim; ++j) {
      out << ',' << (j < r.theta.size() ? format_double(r.theta[j]) : std::string());
    }
    out << '\n';
  }
}

void write_trace_csv(std::ostream& out, const std::vector<RunTrace>& traces) {
  if (traces.empty()) throw ArgumentError("write_trace_csv: no traces");
  const int dim = traces.front().dim;
  out << trace_csv_header(dim) << '\n';
  int id = 1;
  for (const auto& t : traces) {
    if (t.dim != dim) throw ArgumentError("write_trace_csv: traces differ in dimension");
    write_trace_rows(out, t, id++);
  }
}

std::vector<TraceFileRun> read_trace_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ArgumentError("trace file is empty");
  const auto header = split_commas(line);
  if (header.size() < 12 || (header.size() - 10) % 2 != 0) {
    throw ArgumentError("trace file header has an unexpected number of columns");
  }
  const int dim = static_cast<int>((header.size() - 10) / 2);
  if (split_commas(trace_csv_header(dim)) != header) {
    throw ArgumentError("trace file header does not match the trace schema");
  }

  std::vector<TraceFileRun> runs;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto f = split_commas(line);
    if (f.size() != header.size()) {
      throw ArgumentError("trace line " + std::to_string(line_no) + ": wrong number of fields");
    }
    try {
      const int run_id = std::stoi(f[0]);
      if (runs.empty() || runs.back().run_id != run_id) {
        TraceFileRun run;
        run.run_id = run_id;
        run.trace.method_name = f[1];
        run.trace.dim = dim;
        runs.push_back(std::move(run));
      }
      RunRecord r;
      r.iteration = std::stoi(f[2]);
      std::size_t k = 3;
      r.x.resize(dim);
      for (int j = 0; j < dim; ++j) r.x[j] = parse_double(f[k++]);
      r.y = parse_double(f[k++]);
      r.best_y = parse_double(f[k++]);
      const double gap = field_or_nan(f[k++]);
      r.s_next = field_or_nan(f[k++]);
      r.s_max_est = field_or_nan(f[k++]);
      r.a = field_or_nan(f[k++]);
      r.b = field_or_nan(f[k++]);
      r.theta.resize(dim);
      bool has_theta = true;
      for (int j = 0; j < dim; ++j) {
        r.theta[j] = field_or_nan(f[k++]);
        has_theta = has_theta && std::isfinite(r.theta[j]);
      }
      if (!has_theta) r.theta.resize(0);
      r.initial = !has_theta;
      RunTrace& t = runs.back().trace;
      if (std::isfinite(gap) && !t.f_min) t.f_min = r.best_y - gap;
      t.records.push_back(std::move(r));
    } catch (const std::invalid_argument&) {
      throw ArgumentError("trace line " + std::to_string(line_no) + ": bad integer field");
    } catch (const ArgumentError& e) {
      throw ArgumentError("trace line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  for (auto& run : runs) {
    auto& t = run.trace;
    if (t.records.empty()) continue;
    std::size_t arg = 0;
    for (std::size_t i = 1; i < t.records.size(); ++i) {
      if (t.records[i].y < t.records[arg].y) arg = i;
      if (t.records[i].initial) t.n_ini = static_cast<int>(i) + 1;
    }
    if (t.records[0].initial && t.n_ini == 0) t.n_ini = 1;
    t.best_x = t.records[arg].x;
    t.best_y = t.records[arg].y;
  }
  return runs;
}

void write_gap_table(std::ostream& out, const std::vector<GapRow>& rows) {
  out << "method,iteration,n_ok,mean_gap,median_gap,mean_log10_gap,median_log10_gap\n";
  for (const auto& r : rows) {
    out << r.method << ',' << r.iteration << ',' << r.n_ok << ',' << format_double(r.mean_gap)
        << ',' << format_double(r.median_gap) << ',' << format_double(r.mean_log10_gap) << ','
        << format_double(r.median_log10_gap) << '\n';
  }
}

}  // namespace hei
