#include "insightgen/matrix_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

namespace insightgen {

namespace {

void swap_to_little_endian(std::vector<std::uint32_t>& words) {
  if constexpr (std::endian::native == std::endian::little) {
    (void)words;
  } else {
    for (auto& w : words) {
      w = ((w & 0x000000ffu) << 24) | ((w & 0x0000ff00u) << 8) |
          ((w & 0x00ff0000u) >> 8) | ((w & 0xff000000u) >> 24);
    }
  }
}

}  // namespace

void write_matrix_f32(const std::filesystem::path& path, const Mat& m) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(out.good(), ErrorCode::Io, "cannot open for writing: " + path.string());
  const std::size_t count = static_cast<std::size_t>(m.size());
  std::vector<std::uint32_t> words(count);
  static_assert(sizeof(float) == sizeof(std::uint32_t));
  if (count > 0) std::memcpy(words.data(), m.data(), count * sizeof(float));
  swap_to_little_endian(words);
  out.write(reinterpret_cast<const char*>(words.data()),
            static_cast<std::streamsize>(count * sizeof(std::uint32_t)));
  out.flush();
  require(out.good(), ErrorCode::Io, "write failed: " + path.string());
}

Mat read_matrix_f32(const std::filesystem::path& path, Eigen::Index rows,
                    Eigen::Index cols) {
  require(rows >= 0 && cols >= 0, ErrorCode::Contract,
          "read_matrix_f32: negative shape");
  std::ifstream in(path, std::ios::binary);
  require(in.good(), ErrorCode::Io, "cannot open: " + path.string());
  const std::size_t count = static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols);
  std::vector<std::uint32_t> words(count);
  in.read(reinterpret_cast<char*>(words.data()),
          static_cast<std::streamsize>(count * sizeof(std::uint32_t)));
  require(static_cast<std::size_t>(in.gcount()) == count * sizeof(std::uint32_t),
          ErrorCode::Io, "short read: " + path.string());
  in.peek();
  require(in.eof(), ErrorCode::Io,
          "file size does not match declared shape: " + path.string());
  swap_to_little_endian(words);
  Mat m(rows, cols);
  if (count > 0) std::memcpy(m.data(), words.data(), count * sizeof(float));
  return m;
}

}  // namespace insightgen
