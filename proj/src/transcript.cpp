#include "csg/transcript.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace csg {

namespace {

void append_num(std::string& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  out += buf;
}

}  // namespace

std::string transcript_to_csv(const Transcript& tr) {
  std::string out = "round,epoch";
  for (int j = 0; j < tr.m; ++j) out += ",h_" + std::to_string(j);
  for (int j = 0; j < tr.m; ++j) out += ",p_" + std::to_string(j);
  out += ",y,u_p,u_a\n";
  for (const auto& r : tr.rows) {
    out += std::to_string(r.round);
    out += ',';
    out += std::to_string(r.epoch);
    for (int j = 0; j < tr.m; ++j) {
      out += ',';
      append_num(out, r.h[j]);
    }
    for (int j = 0; j < tr.m; ++j) {
      out += ',';
      append_num(out, r.p[j]);
    }
    out += ',';
    append_num(out, r.y);
    out += ',';
    append_num(out, r.u_p);
    out += ',';
    append_num(out, r.u_a);
    out += '\n';
  }
  return out;
}

Transcript transcript_from_csv(const std::string& csv, bool continuous) {
  Transcript tr;
  tr.continuous = continuous;
  std::istringstream in(csv);
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("empty transcript file");
  // Infer m from the header column count: 2 + 2m + 3 columns.
  int cols = 1;
  for (char c : line) {
    if (c == ',') ++cols;
  }
  tr.m = (cols - 5) / 2;
  if (tr.m < 1 || cols != 5 + 2 * tr.m) throw ConfigError("malformed transcript header");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    TranscriptRow r;
    r.h.resize(tr.m);
    r.p.resize(tr.m);
    std::istringstream ls(line);
    std::string cell;
    auto next = [&]() {
      if (!std::getline(ls, cell, ',')) throw ConfigError("short transcript row");
      return cell;
    };
    r.round = std::stoll(next());
    r.epoch = std::stoi(next());
    for (int j = 0; j < tr.m; ++j) r.h[j] = std::stod(next());
    for (int j = 0; j < tr.m; ++j) r.p[j] = std::stod(next());
    r.y = std::stod(next());
    r.u_p = std::stod(next());
    r.u_a = std::stod(next());
    tr.rows.push_back(std::move(r));
  }
  return tr;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot open for writing: " + path);
  out << content;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace csg
