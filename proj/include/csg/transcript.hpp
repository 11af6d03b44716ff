#pragma once

#include <string>
#include <vector>

#include "csg/common.hpp"

namespace csg {

// One protocol round.  y is the agent action: an integer index for finite
// games (stored exactly as a double), a real response for continuous ones.
struct TranscriptRow {
  long long round = 0;
  int epoch = 0;
  Vector h;
  Vector p;
  double y = 0.0;
  double u_p = 0.0;
  double u_a = 0.0;
};

struct Transcript {
  int m = 0;
  bool continuous = false;
  std::vector<TranscriptRow> rows;

  long long size() const { return static_cast<long long>(rows.size()); }
};

// CSV with header round,epoch,h_0..h_{m-1},p_0..p_{m-1},y,u_p,u_a; values
// printed with %.17g so replay round-trips bit-exactly.
std::string transcript_to_csv(const Transcript& tr);
Transcript transcript_from_csv(const std::string& csv, bool continuous = false);

void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

}  // namespace csg
