#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace inkmotion {

// One sensor sample: time delta since the previous frame, rotation in
// degrees, acceleration in mm/s^2.
struct Frame {
  long td_ms = 0;
  double yaw_deg = 0, pitch_deg = 0, roll_deg = 0;
  double ax = 0, ay = 0, az = 0;

  bool operator==(const Frame&) const = default;
};

// Lowercase letter class, bijective with index 0..25.
struct Label {
  char letter = 'a';
  int index = 0;

  static Label from_letter(char c);
  static Label from_index(int i);
  bool operator==(const Label&) const = default;
};

inline constexpr int kNumClasses = 26;

// One writing event: ordered frames plus letter label and subject.
struct Sequence {
  std::vector<Frame> frames;
  Label label;
  std::string subject_id;
  std::string sequence_id;
};

// Mean orientation of a subject's 10-second upright hold.
struct CalibrationRecord {
  std::string subject_id;
  double mean_yaw = 0, mean_pitch = 0, mean_roll = 0;
};

struct Dataset {
  std::vector<Sequence> sequences;
  std::map<std::string, CalibrationRecord> calibrations;
};

// Parses one CSV line "td,yaw,pitch,roll,ax,ay,az". Throws on a malformed
// field count, non-numeric fields, or a negative td, naming the line.
Frame parse_frame(std::string_view line);

// Shortest round-trip formatting; parse_frame(format_frame(f)) == f exactly.
std::string format_frame(const Frame& f);

// t_0 = 0, t_i = t_{i-1} + td of frame i. Non-decreasing, length M.
std::vector<long> timestamps(const Sequence& seq);

struct LoadStats {
  std::size_t skipped_short = 0;  // files with fewer than 2 frames
};

// Layout: <root>/<subject_id>/<letter>/<sequence_id>.csv plus optional
// <root>/<subject_id>/calibration.csv ("mean_yaw,mean_pitch,mean_roll").
// Sequences are returned sorted by (subject, label, sequence id).
Dataset load_dataset(const std::filesystem::path& root, LoadStats* stats = nullptr);

void write_dataset(const Dataset& d, const std::filesystem::path& root);

// shortest round-trip decimal formatting for doubles (shared CSV helper)
std::string format_double(double v);

}  // namespace inkmotion
