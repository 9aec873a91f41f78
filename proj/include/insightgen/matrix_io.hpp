#pragma once

#include <filesystem>

#include "insightgen/embedding.hpp"

namespace insightgen {

// Row-major float32, little-endian on disk regardless of host order.
void write_matrix_f32(const std::filesystem::path& path, const Mat& m);
Mat read_matrix_f32(const std::filesystem::path& path, Eigen::Index rows,
                    Eigen::Index cols);

}  // namespace insightgen
