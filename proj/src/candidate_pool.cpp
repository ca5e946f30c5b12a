#include "framesel/candidate_pool.hpp"

#include <cmath>
#include <utility>

#include "framesel/error.hpp"

namespace framesel {

void VideoMeta::validate() const {
  if (!(fps > 0.0) || !std::isfinite(fps)) {
    throw Error(ErrorKind::Parameter, "fps must be a positive finite number");
  }
  if (total_frames == 0) {
    throw Error(ErrorKind::Parameter, "total_frames must be at least 1");
  }
}

std::uint64_t VideoMeta::duration_seconds() const {
  validate();
  return static_cast<std::uint64_t>(
      std::floor(static_cast<double>(total_frames) / fps));
}

std::vector<std::uint64_t> even_spacing(std::uint64_t total, std::size_t count) {
  if (count < 2 || total <= count) {
    throw Error(ErrorKind::DegenerateSpacing,
                "even spacing needs total > count >= 2 (total=" + std::to_string(total) +
                    ", count=" + std::to_string(count) + ")");
  }
  const double last = static_cast<double>(total - 1);
  const double denom = static_cast<double>(count - 1);
  std::vector<std::uint64_t> out(count);
  for (std::size_t k = 0; k < count; ++k) {
    out[k] = static_cast<std::uint64_t>(std::trunc(static_cast<double>(k) * last / denom));
  }
  return out;
}

CandidatePool::CandidatePool(VideoMeta meta, std::size_t cap,
                             std::vector<std::uint64_t> seconds)
    : meta_(std::move(meta)), cap_(cap), seconds_(std::move(seconds)) {
  meta_.validate();
  if (cap_ == 0) throw Error(ErrorKind::Parameter, "cap must be at least 1");
  if (seconds_.empty()) throw Error(ErrorKind::EmptyPool, "candidate pool is empty");
  if (seconds_.size() > cap_) {
    throw Error(ErrorKind::Alignment, "pool holds " + std::to_string(seconds_.size()) +
                                          " seconds but cap is " + std::to_string(cap_));
  }
  const std::uint64_t duration = meta_.duration_seconds();
  for (std::size_t i = 0; i < seconds_.size(); ++i) {
    if (seconds_[i] >= duration) {
      throw Error(ErrorKind::Alignment, "second " + std::to_string(seconds_[i]) +
                                            " outside video of " + std::to_string(duration) +
                                            " s");
    }
    if (i > 0 && seconds_[i] <= seconds_[i - 1]) {
      throw Error(ErrorKind::Alignment, "pool seconds must be strictly increasing");
    }
  }
}

std::uint64_t CandidatePool::second_of_position(std::size_t position) const {
  if (position < 1 || position > seconds_.size()) {
    throw Error(ErrorKind::Index, "position " + std::to_string(position) +
                                      " outside [1, " + std::to_string(seconds_.size()) + "]");
  }
  return seconds_[position - 1];
}

std::uint64_t CandidatePool::frame_index_of_position(std::size_t position) const {
  return frame_index_of_second(meta_, second_of_position(position));
}

CandidatePool build_pool(const VideoMeta& meta, std::size_t cap) {
  if (cap == 0) throw Error(ErrorKind::Parameter, "cap must be at least 1");
  const std::uint64_t duration = meta.duration_seconds();
  if (duration == 0) {
    throw Error(ErrorKind::EmptyPool, "video shorter than one second (fps=" +
                                          std::to_string(meta.fps) + ", frames=" +
                                          std::to_string(meta.total_frames) + ")");
  }
  std::vector<std::uint64_t> seconds;
  if (duration <= cap) {
    seconds.resize(duration);
    for (std::uint64_t s = 0; s < duration; ++s) seconds[s] = s;
  } else {
    seconds = even_spacing(duration, cap);
  }
  return CandidatePool(meta, cap, std::move(seconds));
}

std::uint64_t frame_index_of_second(const VideoMeta& meta, std::uint64_t second) {
  meta.validate();
  const double raw = std::floor(static_cast<double>(second) * meta.fps);
  const double last = static_cast<double>(meta.total_frames - 1);
  if (!(raw > 0.0)) return 0;
  if (raw >= last) return meta.total_frames - 1;
  return static_cast<std::uint64_t>(raw);
}

}  // namespace framesel
