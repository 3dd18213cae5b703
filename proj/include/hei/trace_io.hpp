#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "hei/bench.hpp"
#include "hei/driver.hpp"

namespace hei {

/// Shortest decimal that parses back to the same double; empty for NaN.
std::string format_double(double v);
/// Parses a full-precision decimal (also "inf", "-inf", "nan"). Throws ArgumentError.
double parse_double(const std::string& text);

/// Header run_id,method,iteration,x_1..x_d,y,best_y,gap,s_next,s_max_est,a,b,theta_1..theta_d.
std::string trace_csv_header(int dim);
void write_trace_rows(std::ostream& out, const RunTrace& trace, int run_id);
/// Header plus every trace, numbered from 1. All traces must share one dimension.
void write_trace_csv(std::ostream& out, const std::vector<RunTrace>& traces);

struct TraceFileRun {
  int run_id = 0;
  RunTrace trace;
};
/// Reads a file written by write_trace_csv. Throws ArgumentError on malformed input.
std::vector<TraceFileRun> read_trace_csv(std::istream& in);

void write_gap_table(std::ostream& out, const std::vector<GapRow>& rows);

}  // namespace hei
