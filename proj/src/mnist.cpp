#include "kgalign/mnist.hpp"

#include "kgalign/errors.hpp"

#include <fstream>

namespace kgalign {

Eigen::MatrixXd MnistDataset::batch(const std::vector<int>& order, int first, int n,
                                    std::vector<int>* labels_out) const {
    Eigen::MatrixXd out(n, pixels());
    if (labels_out) labels_out->resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const int s = order[static_cast<std::size_t>(first + i)];
        const float* src = images.data() + static_cast<std::size_t>(s) * pixels();
        for (int k = 0; k < pixels(); ++k) {
            out(i, k) = static_cast<double>(src[k]);
        }
        if (labels_out) (*labels_out)[static_cast<std::size_t>(i)] = labels[static_cast<std::size_t>(s)];
    }
    return out;
}

namespace {

constexpr std::uint32_t kImageMagic = 0x00000803;
constexpr std::uint32_t kLabelMagic = 0x00000801;

std::uint32_t read_u32_be(std::ifstream& in, const std::string& what) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    if (!in) {
        throw IdxError(IdxError::Kind::Truncated, "idx: truncated while reading " + what);
    }
    return (static_cast<std::uint32_t>(b[0]) << 24) | (static_cast<std::uint32_t>(b[1]) << 16) |
           (static_cast<std::uint32_t>(b[2]) << 8) | static_cast<std::uint32_t>(b[3]);
}

void write_u32_be(std::ofstream& out, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v >> 24),
                          static_cast<unsigned char>(v >> 16),
                          static_cast<unsigned char>(v >> 8),
                          static_cast<unsigned char>(v)};
    out.write(reinterpret_cast<const char*>(b), 4);
}

} // namespace

MnistDataset load_mnist_idx(const std::filesystem::path& images_path,
                            const std::filesystem::path& labels_path) {
    std::ifstream img(images_path, std::ios::binary);
    if (!img) {
        throw IdxError(IdxError::Kind::Io, "idx: cannot open '" + images_path.string() + "'");
    }
    const std::uint32_t img_magic = read_u32_be(img, "image magic");
    if (img_magic != kImageMagic) {
        throw IdxError(IdxError::Kind::WrongMagic,
                       "idx: '" + images_path.string() + "' has magic " +
                           std::to_string(img_magic) + ", expected 2051");
    }
    const std::uint32_t n_images = read_u32_be(img, "image count");
    const std::uint32_t rows = read_u32_be(img, "row count");
    const std::uint32_t cols = read_u32_be(img, "column count");
    if (rows != 28 || cols != 28) {
        throw IdxError(IdxError::Kind::BadShape,
                       "idx: expected 28x28 images, got " + std::to_string(rows) + "x" +
                           std::to_string(cols));
    }

    std::ifstream lab(labels_path, std::ios::binary);
    if (!lab) {
        throw IdxError(IdxError::Kind::Io, "idx: cannot open '" + labels_path.string() + "'");
    }
    const std::uint32_t lab_magic = read_u32_be(lab, "label magic");
    if (lab_magic != kLabelMagic) {
        throw IdxError(IdxError::Kind::WrongMagic,
                       "idx: '" + labels_path.string() + "' has magic " +
                           std::to_string(lab_magic) + ", expected 2049");
    }
    const std::uint32_t n_labels = read_u32_be(lab, "label count");
    if (n_labels != n_images) {
        throw IdxError(IdxError::Kind::CountMismatch,
                       "idx: " + std::to_string(n_images) + " images vs " +
                           std::to_string(n_labels) + " labels");
    }

    MnistDataset ds;
    ds.count = static_cast<int>(n_images);
    ds.rows = static_cast<int>(rows);
    ds.cols = static_cast<int>(cols);
    const std::size_t npix = static_cast<std::size_t>(ds.count) * ds.pixels();

    std::vector<std::uint8_t> raw(npix);
    img.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(npix));
    if (img.gcount() != static_cast<std::streamsize>(npix)) {
        throw IdxError(IdxError::Kind::Truncated, "idx: image payload truncated");
    }
    ds.images.resize(npix);
    for (std::size_t i = 0; i < npix; ++i) {
        ds.images[i] = static_cast<float>(raw[i]) / 255.0f;
    }

    ds.labels.resize(static_cast<std::size_t>(ds.count));
    lab.read(reinterpret_cast<char*>(ds.labels.data()), ds.count);
    if (lab.gcount() != static_cast<std::streamsize>(ds.count)) {
        throw IdxError(IdxError::Kind::Truncated, "idx: label payload truncated");
    }
    return ds;
}

void write_idx_images(const std::filesystem::path& path,
                      const std::vector<std::uint8_t>& pixels, int count, int rows, int cols) {
    if (static_cast<std::size_t>(count) * rows * cols != pixels.size()) {
        throw InvalidArgument("write_idx_images: pixel buffer does not match dimensions");
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IdxError(IdxError::Kind::Io, "idx: cannot write '" + path.string() + "'");
    }
    write_u32_be(out, kImageMagic);
    write_u32_be(out, static_cast<std::uint32_t>(count));
    write_u32_be(out, static_cast<std::uint32_t>(rows));
    write_u32_be(out, static_cast<std::uint32_t>(cols));
    out.write(reinterpret_cast<const char*>(pixels.data()),
              static_cast<std::streamsize>(pixels.size()));
}

void write_idx_labels(const std::filesystem::path& path,
                      const std::vector<std::uint8_t>& labels) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IdxError(IdxError::Kind::Io, "idx: cannot write '" + path.string() + "'");
    }
    write_u32_be(out, kLabelMagic);
    write_u32_be(out, static_cast<std::uint32_t>(labels.size()));
    out.write(reinterpret_cast<const char*>(labels.data()),
              static_cast<std::streamsize>(labels.size()));
}

} // namespace kgalign
