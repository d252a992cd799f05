#include "inkmotion/preprocess.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace inkmotion {

Sequence calibrate(const Sequence& seq, const CalibrationRecord& cal) {
  if (cal.subject_id != seq.subject_id)
    throw std::runtime_error("calibration subject '" + cal.subject_id +
                             "' does not match sequence subject '" + seq.subject_id + "'");
  Sequence out = seq;
  for (auto& f : out.frames) {
    f.yaw_deg -= cal.mean_yaw;
    f.pitch_deg -= cal.mean_pitch;
    f.roll_deg -= cal.mean_roll;
  }
  return out;
}

Sequence zero_origin(const Sequence& seq) {
  Sequence out = seq;
  if (out.frames.empty()) return out;
  const double y0 = out.frames[0].yaw_deg;
  const double p0 = out.frames[0].pitch_deg;
  const double r0 = out.frames[0].roll_deg;
  for (auto& f : out.frames) {
    f.yaw_deg -= y0;
    f.pitch_deg -= p0;
    f.roll_deg -= r0;
  }
  return out;
}

ResampledSequence resample(const Sequence& seq, std::size_t n) {
  if (n < 2) throw std::invalid_argument("resample needs n >= 2");
  const std::vector<long> ts = timestamps(seq);

  // collapse duplicate timestamps, keeping the last frame at each
  std::vector<double> t;
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (!t.empty() && static_cast<double>(ts[i]) == t.back())
      idx.back() = i;
    else {
      t.push_back(static_cast<double>(ts[i]));
      idx.push_back(i);
    }
  }
  if (t.size() < 2)
    throw std::runtime_error("sequence '" + seq.sequence_id +
                             "' has fewer than 2 distinct timestamps");

  ResampledSequence out;
  out.n_features = n;
  out.values.resize(n * 3);
  out.label = seq.label;
  out.subject_id = seq.subject_id;
  out.sequence_id = seq.sequence_id;

  const double t_min = t.front(), t_max = t.back();
  std::size_t seg = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double ti = (i == n - 1)
                          ? t_max
                          : t_min + (t_max - t_min) * static_cast<double>(i) /
                                        static_cast<double>(n - 1);
    while (seg + 2 < t.size() && t[seg + 1] < ti) ++seg;
    const double t0 = t[seg], t1 = t[seg + 1];
    const double w = (ti - t0) / (t1 - t0);
    const Frame& f0 = seq.frames[idx[seg]];
    const Frame& f1 = seq.frames[idx[seg + 1]];
    out.at(i, 0) = f0.yaw_deg + (f1.yaw_deg - f0.yaw_deg) * w;
    out.at(i, 1) = f0.pitch_deg + (f1.pitch_deg - f0.pitch_deg) * w;
    out.at(i, 2) = f0.roll_deg + (f1.roll_deg - f0.roll_deg) * w;
  }
  return out;
}

std::vector<double> flatten(const ResampledSequence& r) {
  return r.values;  // storage already interleaved per timestamp
}

ResampledSequence unflatten(const std::vector<double>& flat, std::size_t n,
                            Label label, std::string subject_id,
                            std::string sequence_id) {
  if (flat.size() != n * 3)
    throw std::invalid_argument("unflatten: expected " + std::to_string(n * 3) +
                                " values, got " + std::to_string(flat.size()));
  ResampledSequence r;
  r.values = flat;
  r.n_features = n;
  r.label = label;
  r.subject_id = std::move(subject_id);
  r.sequence_id = std::move(sequence_id);
  return r;
}

std::vector<ResampledSequence> preprocess_dataset(const Dataset& d,
                                                  const PreprocessOptions& opt) {
  std::vector<ResampledSequence> rows(d.sequences.size());
  std::vector<std::string> errors(d.sequences.size());
#pragma omp parallel for schedule(dynamic)
  for (std::size_t i = 0; i < d.sequences.size(); ++i) {
    try {
      const Sequence* s = &d.sequences[i];
      Sequence tmp;
      if (opt.apply_calibration) {
        const auto it = d.calibrations.find(s->subject_id);
        if (it == d.calibrations.end())
          throw std::runtime_error("no calibration record for subject '" +
                                   s->subject_id + "'");
        tmp = calibrate(*s, it->second);
        s = &tmp;
      }
      if (opt.apply_zero_origin) {
        tmp = zero_origin(*s);
        s = &tmp;
      }
      rows[i] = resample(*s, opt.n_features);
    } catch (const std::exception& e) {
      errors[i] = "sequence '" + d.sequences[i].sequence_id + "': " + e.what();
    }
  }
  for (const auto& e : errors)
    if (!e.empty()) throw std::runtime_error(e);
  return rows;
}

void write_resampled_csv(const std::vector<ResampledSequence>& rows,
                         const std::filesystem::path& file) {
  std::ofstream out(file);
  if (!out) throw std::runtime_error("cannot write " + file.string());
  for (const auto& r : rows) {
    out << r.subject_id << ',' << r.label.letter;
    for (double v : r.values) out << ',' << format_double(v);
    out << '\n';
  }
}

std::vector<ResampledSequence> read_resampled_csv(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot open " + file.string());
  std::vector<ResampledSequence> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (line.back() == '\r') line.pop_back();
    std::vector<std::string_view> fields;
    std::string_view rest(line);
    while (true) {
      const std::size_t comma = rest.find(',');
      if (comma == std::string_view::npos) {
        fields.push_back(rest);
        break;
      }
      fields.push_back(rest.substr(0, comma));
      rest.remove_prefix(comma + 1);
    }
    if (fields.size() < 2 + 6 || (fields.size() - 2) % 3 != 0)
      throw std::runtime_error(file.string() + ":" + std::to_string(lineno) +
                               ": bad field count " + std::to_string(fields.size()));
    if (fields[1].size() != 1)
      throw std::runtime_error(file.string() + ":" + std::to_string(lineno) +
                               ": bad label field");
    ResampledSequence r;
    r.subject_id = std::string(fields[0]);
    r.label = Label::from_letter(fields[1][0]);
    r.n_features = (fields.size() - 2) / 3;
    r.values.reserve(fields.size() - 2);
    for (std::size_t i = 2; i < fields.size(); ++i) {
      double v = 0;
      auto [ptr, ec] = std::from_chars(fields[i].data(), fields[i].data() + fields[i].size(), v);
      if (ec != std::errc() || ptr != fields[i].data() + fields[i].size() || !std::isfinite(v))
        throw std::runtime_error(file.string() + ":" + std::to_string(lineno) +
                                 ": non-numeric value field");
      r.values.push_back(v);
    }
    r.sequence_id = "row_" + std::to_string(lineno - 1);
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace inkmotion
