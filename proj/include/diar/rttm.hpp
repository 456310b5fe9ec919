#pragma once

#include <iosfwd>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "diar/types.hpp"

namespace diar {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& source, int line, const std::string& message);

  int line() const { return line_; }

 private:
  int line_;
};

// Reads NIST RTTM. Only SPEAKER lines produce turns; every other line type
// is skipped. Fields are separated by runs of blanks/tabs; both the 9- and
// 10-field layouts seen in the wild are accepted:
//   SPEAKER <file> <chan> <onset> <dur> <ortho> <spkr-type> <speaker> <conf> [<lookahead>]
// Malformed SPEAKER lines raise ParseError naming the offending line.
std::vector<Turn> parse_rttm(std::istream& in, const std::string& source_name = "<rttm>");

// Groups turns into one Annotation per file_id, speaker lists sorted.
// The result is independent of the input order of the turns.
std::map<std::string, Annotation> group_by_file(std::span<const Turn> turns);

// Emits SPEAKER lines in chronological order, times with 3 fractional
// digits. parse_rttm(write_rttm(a)) reproduces `a` for millisecond-grid
// annotations.
void write_rttm(const Annotation& annotation, std::ostream& out);

// UEM: "<file> <chan> <start> <end>" per line. Regions of the same file are
// coalesced into sorted disjoint intervals.
std::map<std::string, ScoringRegion> parse_uem(std::istream& in,
                                               const std::string& source_name = "<uem>");

// One warning per group of identical duplicate turns. Duplicates stay in the
// annotation (they count as segments); callers decide whether to escalate.
std::vector<std::string> duplicate_turn_warnings(const Annotation& annotation);

}  // namespace diar
