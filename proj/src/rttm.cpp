#include "diar/rttm.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "diar/timeline.hpp"

namespace diar {

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t pos = 0;
  while (pos < line.size()) {
    while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t')) {
      ++pos;
    }
    std::size_t start = pos;
    while (pos < line.size() && line[pos] != ' ' && line[pos] != '\t') {
      ++pos;
    }
    if (pos > start) {
      fields.push_back(line.substr(start, pos - start));
    }
  }
  return fields;
}

bool parse_double(std::string_view field, double* out) {
  const char* first = field.data();
  const char* last = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(first, last, *out);
  return ec == std::errc() && ptr == last && std::isfinite(*out);
}

bool parse_int(std::string_view field, int* out) {
  const char* first = field.data();
  const char* last = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(first, last, *out);
  return ec == std::errc() && ptr == last;
}

// Sort key shared by annotation speaker lists and RTTM output.
bool turn_before(const Turn& a, const Turn& b) {
  if (a.onset != b.onset) return a.onset < b.onset;
  if (a.duration != b.duration) return a.duration < b.duration;
  return a.channel < b.channel;
}

}  // namespace

bool operator==(const Turn& a, const Turn& b) {
  return a.file_id == b.file_id && a.channel == b.channel && a.onset == b.onset &&
         a.duration == b.duration && a.speaker == b.speaker;
}

bool operator==(const Annotation& a, const Annotation& b) {
  return a.file_id == b.file_id && a.turns_by_speaker == b.turns_by_speaker;
}

void Annotation::add_turn(const Turn& turn) {
  if (file_id.empty()) {
    file_id = turn.file_id;
  } else if (turn.file_id != file_id) {
    throw std::invalid_argument("turn file_id '" + turn.file_id +
                                "' does not match annotation '" + file_id + "'");
  }
  auto& turns = turns_by_speaker[turn.speaker];
  auto pos = std::upper_bound(turns.begin(), turns.end(), turn, turn_before);
  turns.insert(pos, turn);
}

std::vector<std::string> Annotation::speakers() const {
  std::vector<std::string> result;
  result.reserve(turns_by_speaker.size());
  for (const auto& [speaker, turns] : turns_by_speaker) {
    (void)turns;
    result.push_back(speaker);
  }
  return result;
}

std::size_t Annotation::num_turns() const {
  std::size_t count = 0;
  for (const auto& [speaker, turns] : turns_by_speaker) {
    (void)speaker;
    count += turns.size();
  }
  return count;
}

ParseError::ParseError(const std::string& source, int line, const std::string& message)
    : std::runtime_error(source + ":" + std::to_string(line) + ": " + message), line_(line) {}

std::vector<Turn> parse_rttm(std::istream& in, const std::string& source_name) {
  std::vector<Turn> turns;
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    auto fields = split_fields(line);
    if (fields.empty() || fields[0] != "SPEAKER") {
      continue;  // other record types (SPKR-INFO, NON-SPEECH, comments, ...)
    }
    if (fields.size() != 9 && fields.size() != 10) {
      throw ParseError(source_name, line_number,
                       "SPEAKER line has " + std::to_string(fields.size()) +
                           " fields, expected 9 or 10");
    }
    Turn turn;
    turn.file_id = std::string(fields[1]);
    if (!parse_int(fields[2], &turn.channel) || turn.channel < 0) {
      throw ParseError(source_name, line_number,
                       "bad channel '" + std::string(fields[2]) + "'");
    }
    if (!parse_double(fields[3], &turn.onset)) {
      throw ParseError(source_name, line_number,
                       "bad onset '" + std::string(fields[3]) + "'");
    }
    if (!parse_double(fields[4], &turn.duration)) {
      throw ParseError(source_name, line_number,
                       "bad duration '" + std::string(fields[4]) + "'");
    }
    if (turn.onset < 0.0) {
      throw ParseError(source_name, line_number, "negative onset");
    }
    if (!(turn.duration > 0.0)) {
      throw ParseError(source_name, line_number, "non-positive duration");
    }
    turn.speaker = std::string(fields[7]);
    turns.push_back(std::move(turn));
  }
  return turns;
}

std::map<std::string, Annotation> group_by_file(std::span<const Turn> turns) {
  std::map<std::string, Annotation> result;
  for (const Turn& turn : turns) {
    result[turn.file_id].add_turn(turn);
  }
  return result;
}

void write_rttm(const Annotation& annotation, std::ostream& out) {
  std::vector<const Turn*> all;
  all.reserve(annotation.num_turns());
  for (const auto& [speaker, turns] : annotation.turns_by_speaker) {
    (void)speaker;
    for (const Turn& turn : turns) {
      all.push_back(&turn);
    }
  }
  std::sort(all.begin(), all.end(), [](const Turn* a, const Turn* b) {
    if (a->onset != b->onset) return a->onset < b->onset;
    if (a->duration != b->duration) return a->duration < b->duration;
    if (a->speaker != b->speaker) return a->speaker < b->speaker;
    return a->channel < b->channel;
  });
  char buffer[64];
  for (const Turn* turn : all) {
    out << "SPEAKER " << turn->file_id << ' ' << turn->channel << ' ';
    std::snprintf(buffer, sizeof(buffer), "%.3f %.3f", turn->onset, turn->duration);
    out << buffer << " <NA> <NA> " << turn->speaker << " <NA> <NA>\n";
  }
  if (!out) {
    throw std::runtime_error("RTTM write failed for " + annotation.file_id);
  }
}

std::map<std::string, ScoringRegion> parse_uem(std::istream& in,
                                               const std::string& source_name) {
  std::map<std::string, Timeline> regions;
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    auto fields = split_fields(line);
    if (fields.empty() || fields[0].starts_with(";;")) {
      continue;
    }
    if (fields.size() != 4) {
      throw ParseError(source_name, line_number,
                       "UEM line has " + std::to_string(fields.size()) +
                           " fields, expected 4");
    }
    double start = 0.0;
    double end = 0.0;
    if (!parse_double(fields[2], &start) || !parse_double(fields[3], &end)) {
      throw ParseError(source_name, line_number, "bad UEM times");
    }
    if (!(end > start)) {
      throw ParseError(source_name, line_number, "UEM end must exceed start");
    }
    regions[std::string(fields[0])].add(start, end);
  }
  std::map<std::string, ScoringRegion> result;
  for (const auto& [file_id, timeline] : regions) {
    ScoringRegion region;
    region.file_id = file_id;
    for (const Interval& iv : timeline.intervals()) {
      region.intervals.emplace_back(iv.start, iv.end);
    }
    result.emplace(file_id, std::move(region));
  }
  return result;
}

std::vector<std::string> duplicate_turn_warnings(const Annotation& annotation) {
  std::vector<std::string> warnings;
  for (const auto& [speaker, turns] : annotation.turns_by_speaker) {
    for (std::size_t i = 1; i < turns.size(); ++i) {
      if (turns[i] == turns[i - 1] && (i == 1 || !(turns[i - 1] == turns[i - 2]))) {
        std::ostringstream msg;
        msg << annotation.file_id << ": duplicate turn for speaker " << speaker << " at "
            << turns[i].onset << "s";
        warnings.push_back(msg.str());
      }
    }
  }
  return warnings;
}

}  // namespace diar
