#include "inkmotion/sensor_data.hpp"

#include <omp.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <system_error>

namespace inkmotion {

namespace fs = std::filesystem;

Label Label::from_letter(char c) {
  if (c < 'a' || c > 'z')
    throw std::invalid_argument(std::string("label letter out of range: '") + c + "'");
  return {c, c - 'a'};
}

Label Label::from_index(int i) {
  if (i < 0 || i >= kNumClasses)
    throw std::invalid_argument("label index out of range: " + std::to_string(i));
  return {static_cast<char>('a' + i), i};
}

std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

namespace {

double parse_field(std::string_view field, std::string_view line) {
  double v = 0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || !std::isfinite(v))
    throw std::runtime_error("non-numeric field '" + std::string(field) +
                             "' in frame line: " + std::string(line));
  return v;
}

}  // namespace

Frame parse_frame(std::string_view line) {
  std::string_view rest = line;
  if (!rest.empty() && rest.back() == '\r') rest.remove_suffix(1);
  double fields[7];
  for (int i = 0; i < 7; ++i) {
    const std::size_t comma = rest.find(',');
    const bool last = (i == 6);
    if (!last && comma == std::string_view::npos)
      throw std::runtime_error("expected 7 comma-separated fields in frame line: " +
                               std::string(line));
    if (last && comma != std::string_view::npos)
      throw std::runtime_error("expected 7 comma-separated fields in frame line: " +
                               std::string(line));
    const std::string_view field = last ? rest : rest.substr(0, comma);
    fields[i] = parse_field(field, line);
    if (!last) rest.remove_prefix(comma + 1);
  }
  if (fields[0] < 0)
    throw std::runtime_error("negative td in frame line: " + std::string(line));
  if (fields[0] != std::floor(fields[0]))
    throw std::runtime_error("fractional td in frame line: " + std::string(line));
  Frame f;
  f.td_ms = static_cast<long>(fields[0]);
  f.yaw_deg = fields[1];
  f.pitch_deg = fields[2];
  f.roll_deg = fields[3];
  f.ax = fields[4];
  f.ay = fields[5];
  f.az = fields[6];
  return f;
}

std::string format_frame(const Frame& f) {
  std::string out = std::to_string(f.td_ms);
  for (double v : {f.yaw_deg, f.pitch_deg, f.roll_deg, f.ax, f.ay, f.az}) {
    out += ',';
    out += format_double(v);
  }
  return out;
}

std::vector<long> timestamps(const Sequence& seq) {
  std::vector<long> ts(seq.frames.size());
  long t = 0;
  for (std::size_t i = 0; i < seq.frames.size(); ++i) {
    if (i > 0) t += seq.frames[i].td_ms;  // frame 0 anchors the axis at zero
    ts[i] = t;
  }
  return ts;
}

namespace {

std::vector<Frame> read_frames(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot open " + file.string());
  std::vector<Frame> frames;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      frames.push_back(parse_frame(line));
    } catch (const std::exception& e) {
      throw std::runtime_error(file.string() + ": " + e.what());
    }
  }
  return frames;
}

CalibrationRecord read_calibration(const fs::path& file, const std::string& subject) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot open " + file.string());
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("empty calibration file " + file.string());
  double v[3];
  std::string_view rest(line);
  if (!rest.empty() && rest.back() == '\r') rest.remove_suffix(1);
  for (int i = 0; i < 3; ++i) {
    const std::size_t comma = rest.find(',');
    const std::string_view field =
        (i == 2) ? rest : rest.substr(0, comma == std::string_view::npos ? rest.size() : comma);
    v[i] = parse_field(field, line);
    if (i < 2) {
      if (comma == std::string_view::npos)
        throw std::runtime_error("expected 3 fields in calibration file " + file.string());
      rest.remove_prefix(comma + 1);
    }
  }
  return {subject, v[0], v[1], v[2]};
}

}  // namespace

Dataset load_dataset(const fs::path& root, LoadStats* stats) {
  if (!fs::is_directory(root))
    throw std::runtime_error("dataset directory not found: " + root.string());

  struct FileEntry {
    fs::path path;
    std::string subject;
    Label label;
    std::string sequence_id;
  };
  std::vector<FileEntry> files;
  Dataset d;

  std::vector<fs::path> subject_dirs;
  for (const auto& e : fs::directory_iterator(root))
    if (e.is_directory()) subject_dirs.push_back(e.path());
  std::sort(subject_dirs.begin(), subject_dirs.end());

  for (const auto& sdir : subject_dirs) {
    const std::string subject = sdir.filename().string();
    const fs::path cal = sdir / "calibration.csv";
    if (fs::exists(cal)) d.calibrations[subject] = read_calibration(cal, subject);
    std::vector<fs::path> letter_dirs;
    for (const auto& e : fs::directory_iterator(sdir))
      if (e.is_directory()) letter_dirs.push_back(e.path());
    std::sort(letter_dirs.begin(), letter_dirs.end());
    for (const auto& ldir : letter_dirs) {
      const std::string name = ldir.filename().string();
      if (name.size() != 1)
        throw std::runtime_error("unknown label directory '" + name + "' under " +
                                 sdir.string());
      const Label label = Label::from_letter(name[0]);  // throws on non a-z
      std::vector<fs::path> seq_files;
      for (const auto& e : fs::directory_iterator(ldir))
        if (e.is_regular_file() && e.path().extension() == ".csv")
          seq_files.push_back(e.path());
      std::sort(seq_files.begin(), seq_files.end());
      for (const auto& f : seq_files)
        files.push_back({f, subject, label, f.stem().string()});
    }
  }

  std::vector<std::optional<Sequence>> slots(files.size());
  std::vector<std::string> errors(files.size());
  std::size_t skipped = 0;
#pragma omp parallel for schedule(dynamic) reduction(+ : skipped)
  for (std::size_t i = 0; i < files.size(); ++i) {
    try {
      Sequence s;
      s.frames = read_frames(files[i].path);
      if (s.frames.size() < 2) {
        ++skipped;
        continue;
      }
      s.label = files[i].label;
      s.subject_id = files[i].subject;
      s.sequence_id = files[i].sequence_id;
      slots[i] = std::move(s);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  }
  for (const auto& e : errors)
    if (!e.empty()) throw std::runtime_error(e);
  if (skipped > 0)
    std::fprintf(stderr, "warning: skipped %zu sequence file(s) with fewer than 2 frames\n",
                 skipped);
  if (stats) stats->skipped_short = skipped;

  for (auto& s : slots)
    if (s) d.sequences.push_back(std::move(*s));
  // directory scan already sorted; keep the canonical order explicit
  std::sort(d.sequences.begin(), d.sequences.end(), [](const Sequence& a, const Sequence& b) {
    return std::tie(a.subject_id, a.label.index, a.sequence_id) <
           std::tie(b.subject_id, b.label.index, b.sequence_id);
  });
  return d;
}

void write_dataset(const Dataset& d, const fs::path& root) {
  fs::create_directories(root);
  for (const auto& [subject, cal] : d.calibrations) {
    const fs::path sdir = root / subject;
    fs::create_directories(sdir);
    std::ofstream out(sdir / "calibration.csv");
    if (!out) throw std::runtime_error("cannot write calibration for " + subject);
    out << format_double(cal.mean_yaw) << ',' << format_double(cal.mean_pitch) << ','
        << format_double(cal.mean_roll) << '\n';
  }
  for (const auto& s : d.sequences) {
    const fs::path dir = root / s.subject_id / std::string(1, s.label.letter);
    fs::create_directories(dir);
    std::ofstream out(dir / (s.sequence_id + ".csv"));
    if (!out) throw std::runtime_error("cannot write sequence " + s.sequence_id);
    for (const auto& f : s.frames) out << format_frame(f) << '\n';
  }
}

}  // namespace inkmotion
