#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <filesystem>
#include <vector>

namespace kgalign {

/// Images as row-major n x 784 floats in [0, 1] (raw byte / 255) with one
/// label per image.
struct MnistDataset {
    int count = 0;
    int rows = 28;
    int cols = 28;
    std::vector<float> images; // count * rows * cols
    std::vector<std::uint8_t> labels;

    int pixels() const { return rows * cols; }

    /// Copies samples [first, first + n) into a double matrix plus labels.
    Eigen::MatrixXd batch(const std::vector<int>& order, int first, int n,
                          std::vector<int>* labels_out) const;
};

/// Parses the big-endian IDX pair used by the MNIST distribution: image
/// magic 0x00000803 with dims [n, 28, 28], label magic 0x00000801 with
/// [n]. Wrong magic, truncation and count mismatch raise distinct IdxError
/// kinds.
MnistDataset load_mnist_idx(const std::filesystem::path& images_path,
                            const std::filesystem::path& labels_path);

/// Writers for fixtures and synthetic corpora; byte-exact inverses of the
/// loader.
void write_idx_images(const std::filesystem::path& path,
                      const std::vector<std::uint8_t>& pixels, int count, int rows, int cols);
void write_idx_labels(const std::filesystem::path& path,
                      const std::vector<std::uint8_t>& labels);

} // namespace kgalign
