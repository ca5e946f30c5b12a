#pragma once

// Bounded 1 FPS candidate pool.
//
// Three aligned coordinate systems are in play:
//   position     1-based index into the pool (and into every embedding matrix)
//   second       integer second of the video, seconds[position - 1]
//   frame index  decoded frame number, clamp(floor(second * fps), 0, T - 1)

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace framesel {

inline constexpr std::size_t kDefaultPoolCap = 1000;

struct VideoMeta {
  std::string video_id;
  double fps = 0.0;
  std::uint64_t total_frames = 0;

  // floor(total_frames / fps). Throws Parameter if fps <= 0 or total_frames == 0.
  std::uint64_t duration_seconds() const;
  void validate() const;
};

// floor(k * (total - 1) / (count - 1)) for k = 0..count-1, evaluated in 64-bit
// floating point with the product formed before the division and truncated
// toward zero. Requires total > count >= 2.
std::vector<std::uint64_t> even_spacing(std::uint64_t total, std::size_t count);

class CandidatePool {
 public:
  CandidatePool(VideoMeta meta, std::size_t cap, std::vector<std::uint64_t> seconds);

  const VideoMeta& meta() const noexcept { return meta_; }
  std::size_t cap() const noexcept { return cap_; }
  std::size_t size() const noexcept { return seconds_.size(); }
  const std::vector<std::uint64_t>& seconds() const noexcept { return seconds_; }

  // position is 1-based; throws Index when outside [1, size()].
  std::uint64_t second_of_position(std::size_t position) const;
  std::uint64_t frame_index_of_position(std::size_t position) const;

 private:
  VideoMeta meta_;
  std::size_t cap_;
  std::vector<std::uint64_t> seconds_;
};

CandidatePool build_pool(const VideoMeta& meta, std::size_t cap = kDefaultPoolCap);

std::uint64_t frame_index_of_second(const VideoMeta& meta, std::uint64_t second);

}  // namespace framesel
