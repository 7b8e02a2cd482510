#include "kgalign/errors.hpp"
#include "kgalign/mnist.hpp"

#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <random>
#include <vector>

using namespace kgalign;

namespace {

/// Two 28x28 images crafted byte by byte straight from the format layout:
/// big-endian magic 2051, n=2, rows=28, cols=28, then raw pixels.
void write_fixture(const std::string& img_path, const std::string& lab_path) {
    std::vector<std::uint8_t> img_bytes = {0x00, 0x00, 0x08, 0x03, // magic 2051
                                           0x00, 0x00, 0x00, 0x02, // 2 images
                                           0x00, 0x00, 0x00, 0x1c, // 28 rows
                                           0x00, 0x00, 0x00, 0x1c};
    for (int i = 0; i < 784; ++i) img_bytes.push_back(static_cast<std::uint8_t>(i % 256));
    for (int i = 0; i < 784; ++i) img_bytes.push_back(static_cast<std::uint8_t>(255 - i % 256));
    std::ofstream img(img_path, std::ios::binary);
    img.write(reinterpret_cast<const char*>(img_bytes.data()),
              static_cast<std::streamsize>(img_bytes.size()));

    const std::vector<std::uint8_t> lab_bytes = {0x00, 0x00, 0x08, 0x01, // magic 2049
                                                 0x00, 0x00, 0x00, 0x02, // 2 labels
                                                 0x07, 0x03};
    std::ofstream lab(lab_path, std::ios::binary);
    lab.write(reinterpret_cast<const char*>(lab_bytes.data()),
              static_cast<std::streamsize>(lab_bytes.size()));
}

} // namespace

TEST_CASE("hand-built fixture parses to exact pixel values") {
    write_fixture("idx_fixture_images", "idx_fixture_labels");
    const MnistDataset ds = load_mnist_idx("idx_fixture_images", "idx_fixture_labels");
    CHECK(ds.count == 2);
    CHECK(ds.labels[0] == 7);
    CHECK(ds.labels[1] == 3);
    CHECK(ds.images[0] == 0.0f);
    CHECK(ds.images[1] == doctest::Approx(1.0f / 255.0f));
    CHECK(ds.images[255] == 1.0f);
    CHECK(ds.images[784] == 1.0f);             // second image starts at 255
    CHECK(ds.images[784 + 255] == 0.0f);
}

TEST_CASE("idx errors are distinct and typed") {
    write_fixture("idx_err_images", "idx_err_labels");

    // labels file passed as images: wrong magic
    try {
        load_mnist_idx("idx_err_labels", "idx_err_labels");
        FAIL("expected IdxError");
    } catch (const IdxError& e) {
        CHECK(e.kind() == IdxError::Kind::WrongMagic);
    }

    // truncated payload
    {
        std::ifstream in("idx_err_images", std::ios::binary);
        std::vector<char> bytes((std::istreambuf_iterator<char>(in)),
                                std::istreambuf_iterator<char>());
        bytes.resize(bytes.size() - 100);
        std::ofstream out("idx_err_trunc", std::ios::binary);
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    }
    try {
        load_mnist_idx("idx_err_trunc", "idx_err_labels");
        FAIL("expected IdxError");
    } catch (const IdxError& e) {
        CHECK(e.kind() == IdxError::Kind::Truncated);
    }

    // count mismatch between the pair
    {
        const std::vector<std::uint8_t> lab3 = {0x00, 0x00, 0x08, 0x01, 0x00, 0x00,
                                                0x00, 0x03, 0x01, 0x02, 0x03};
        std::ofstream out("idx_err_labels3", std::ios::binary);
        out.write(reinterpret_cast<const char*>(lab3.data()),
                  static_cast<std::streamsize>(lab3.size()));
    }
    try {
        load_mnist_idx("idx_err_images", "idx_err_labels3");
        FAIL("expected IdxError");
    } catch (const IdxError& e) {
        CHECK(e.kind() == IdxError::Kind::CountMismatch);
    }

    CHECK_THROWS_AS(load_mnist_idx("no_such_file", "idx_err_labels"), IdxError);
}

TEST_CASE("write then read round-trips byte-exactly") {
    std::mt19937_64 rng(41);
    std::uniform_int_distribution<int> byte(0, 255);
    const int n = 5;
    std::vector<std::uint8_t> pixels(static_cast<std::size_t>(n) * 784);
    std::vector<std::uint8_t> labels(n);
    for (auto& p : pixels) p = static_cast<std::uint8_t>(byte(rng));
    for (auto& l : labels) l = static_cast<std::uint8_t>(byte(rng) % 10);

    write_idx_images("idx_rt_images", pixels, n, 28, 28);
    write_idx_labels("idx_rt_labels", labels);
    const MnistDataset ds = load_mnist_idx("idx_rt_images", "idx_rt_labels");
    CHECK(ds.count == n);
    CHECK(ds.labels == labels);
    for (std::size_t i = 0; i < pixels.size(); ++i) {
        CHECK(ds.images[i] == static_cast<float>(pixels[i]) / 255.0f);
    }
}
