#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "quant/image.hpp"
#include "quant/rng.hpp"
#include "test_support.hpp"

namespace fs = std::filesystem;
using namespace quant;

namespace {

fs::path temp_dir() {
    static fs::path dir = [] {
        fs::path d = fs::current_path() / "tmp_imageio_tests";
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

std::string slurp(const fs::path &p) {
    std::ifstream f(p, std::ios::binary);
    REQUIRE(f.good());
    return std::string(std::istreambuf_iterator<char>(f), {});
}

void spit(const fs::path &p, const void *data, std::size_t n) {
    std::ofstream f(p, std::ios::binary);
    f.write(static_cast<const char *>(data), static_cast<std::streamsize>(n));
}

// Minimal hand-built PNG fixtures (correct CRCs, deflate-compressed):
// 2x1 RGBA with pixels (10,20,30,255) and (40,50,60,128)
const unsigned char kRgbaPng[] = {
    0x89, 0x50, 0x4e, 0x47, 0x0d, 0x0a, 0x1a, 0x0a, 0x00, 0x00, 0x00, 0x0d, 0x49, 0x48,
    0x44, 0x52, 0x00, 0x00, 0x00, 0x02, 0x00, 0x00, 0x00, 0x01, 0x08, 0x06, 0x00, 0x00,
    0x00, 0xf4, 0x22, 0x7f, 0x8a, 0x00, 0x00, 0x00, 0x11, 0x49, 0x44, 0x41, 0x54, 0x78,
    0x9c, 0x63, 0xe0, 0x12, 0x91, 0xfb, 0xaf, 0x61, 0x64, 0xd3, 0x00, 0x00, 0x08, 0xc2,
    0x02, 0x52, 0x06, 0xcb, 0x66, 0xbe, 0x00, 0x00, 0x00, 0x00, 0x49, 0x45, 0x4e, 0x44,
    0xae, 0x42, 0x60, 0x82};
// 1x1 16-bit RGB
const unsigned char kSixteenBitPng[] = {
    0x89, 0x50, 0x4e, 0x47, 0x0d, 0x0a, 0x1a, 0x0a, 0x00, 0x00, 0x00, 0x0d, 0x49, 0x48,
    0x44, 0x52, 0x00, 0x00, 0x00, 0x01, 0x00, 0x00, 0x00, 0x01, 0x10, 0x02, 0x00, 0x00,
    0x00, 0xc0, 0xe7, 0x8f, 0x9d, 0x00, 0x00, 0x00, 0x0f, 0x49, 0x44, 0x41, 0x54, 0x78,
    0x9c, 0x63, 0x60, 0x64, 0x62, 0x66, 0x61, 0x65, 0x03, 0x00, 0x00, 0x3f, 0x00, 0x16,
    0x21, 0xba, 0xd4, 0x54, 0x00, 0x00, 0x00, 0x00, 0x49, 0x45, 0x4e, 0x44, 0xae, 0x42,
    0x60, 0x82};
// 1x1 indexed-color
const unsigned char kPalettePng[] = {
    0x89, 0x50, 0x4e, 0x47, 0x0d, 0x0a, 0x1a, 0x0a, 0x00, 0x00, 0x00, 0x0d, 0x49, 0x48,
    0x44, 0x52, 0x00, 0x00, 0x00, 0x01, 0x00, 0x00, 0x00, 0x01, 0x08, 0x03, 0x00, 0x00,
    0x00, 0x28, 0xcb, 0x34, 0xbb, 0x00, 0x00, 0x00, 0x03, 0x50, 0x4c, 0x54, 0x45, 0x07,
    0x08, 0x09, 0x13, 0x30, 0x19, 0xf3, 0x00, 0x00, 0x00, 0x0a, 0x49, 0x44, 0x41, 0x54,
    0x78, 0x9c, 0x63, 0x60, 0x00, 0x00, 0x00, 0x02, 0x00, 0x01, 0x48, 0xaf, 0xa4, 0x71,
    0x00, 0x00, 0x00, 0x00, 0x49, 0x45, 0x4e, 0x44, 0xae, 0x42, 0x60, 0x82};

} // namespace

TEST_CASE("ppm writer emits exact bytes") {
    RawImage img;
    img.width = 1;
    img.height = 1;
    img.pixels = {{255, 255, 255}};
    const fs::path p = temp_dir() / "white.ppm";
    save_ppm(img, p.string());
    const std::string bytes = slurp(p);
    CHECK(bytes == std::string("P6\n1 1\n255\n\xFF\xFF\xFF", 14));
}

TEST_CASE("ppm round trip preserves pixels") {
    RawImage img = testsup::random_noise_image(13, 7, 42);
    const fs::path p = temp_dir() / "rt.ppm";
    save_ppm(img, p.string());
    LoadedImage back = load_image(p.string());
    CHECK(back.warnings.empty());
    REQUIRE(back.image.width == 13);
    REQUIRE(back.image.height == 7);
    for (std::size_t i = 0; i < img.pixels.size(); ++i) {
        CHECK(back.image.pixels[i].r == img.pixels[i].r);
        CHECK(back.image.pixels[i].g == img.pixels[i].g);
        CHECK(back.image.pixels[i].b == img.pixels[i].b);
    }
}

TEST_CASE("ppm header comments and whitespace are tolerated") {
    const std::string data = "P6 # binary pixmap\n2 # width\n# full line comment\n1\n255\n"
                             "\x01\x02\x03\x0A\x0B\x0C";
    const fs::path p = temp_dir() / "comments.ppm";
    spit(p, data.data(), data.size());
    LoadedImage li = load_image(p.string());
    REQUIRE(li.image.width == 2);
    REQUIRE(li.image.height == 1);
    CHECK(li.image.pixels[0].r == 1);
    CHECK(li.image.pixels[1].b == 0x0C);
}

TEST_CASE("ppm with unsupported maxval is rejected") {
    const std::string data = "P6\n1 1\n65535\n\x10\x11\x12\x13\x14\x15";
    const fs::path p = temp_dir() / "deep.ppm";
    spit(p, data.data(), data.size());
    CHECK_THROWS_WITH_AS(load_image(p.string()), doctest::Contains("maxval"),
                         std::runtime_error);
}

TEST_CASE("truncated ppm raster is rejected") {
    const std::string data = "P6\n2 2\n255\nabcdef"; // 6 of 12 raster bytes
    const fs::path p = temp_dir() / "trunc.ppm";
    spit(p, data.data(), data.size());
    CHECK_THROWS_WITH_AS(load_image(p.string()), doctest::Contains("truncated"),
                         std::runtime_error);
}

TEST_CASE("png round trip preserves pixels") {
    RawImage img = testsup::synthetic_photo(20, 11, 7);
    const fs::path p = temp_dir() / "rt.png";
    save_png(img, p.string());
    LoadedImage back = load_image(p.string());
    CHECK(back.warnings.empty());
    REQUIRE(back.image.width == 20);
    REQUIRE(back.image.height == 11);
    for (std::size_t i = 0; i < img.pixels.size(); ++i) {
        REQUIRE(back.image.pixels[i].r == img.pixels[i].r);
        REQUIRE(back.image.pixels[i].g == img.pixels[i].g);
        REQUIRE(back.image.pixels[i].b == img.pixels[i].b);
    }
}

TEST_CASE("rgba png loads with alpha stripped and a warning") {
    const fs::path p = temp_dir() / "rgba.png";
    spit(p, kRgbaPng, sizeof(kRgbaPng));
    LoadedImage li = load_image(p.string());
    REQUIRE(li.image.width == 2);
    REQUIRE(li.image.height == 1);
    CHECK(li.image.pixels[0].r == 10);
    CHECK(li.image.pixels[0].g == 20);
    CHECK(li.image.pixels[0].b == 30);
    CHECK(li.image.pixels[1].r == 40);
    CHECK(li.image.pixels[1].g == 50);
    CHECK(li.image.pixels[1].b == 60);
    REQUIRE(li.warnings.size() == 1);
    CHECK(li.warnings[0].find("alpha channel stripped") != std::string::npos);
}

TEST_CASE("png with 16-bit depth is rejected") {
    const fs::path p = temp_dir() / "deep.png";
    spit(p, kSixteenBitPng, sizeof(kSixteenBitPng));
    CHECK_THROWS_AS(load_image(p.string()), std::runtime_error);
}

TEST_CASE("indexed png is rejected") {
    const fs::path p = temp_dir() / "indexed.png";
    spit(p, kPalettePng, sizeof(kPalettePng));
    CHECK_THROWS_AS(load_image(p.string()), std::runtime_error);
}

TEST_CASE("corrupt png is rejected with a sane error") {
    std::vector<unsigned char> bad(kRgbaPng, kRgbaPng + sizeof(kRgbaPng));
    for (std::size_t i = 40; i < 50; ++i) bad[i] ^= 0xFF; // zap IDAT
    const fs::path p = temp_dir() / "corrupt.png";
    spit(p, bad.data(), bad.size());
    CHECK_THROWS_AS(load_image(p.string()), std::runtime_error);
}

TEST_CASE("unknown format and missing file are rejected") {
    const fs::path p = temp_dir() / "mystery.bin";
    spit(p, "GIF89a??", 8);
    CHECK_THROWS_AS(load_image(p.string()), std::runtime_error);
    CHECK_THROWS_AS(load_image((temp_dir() / "nope.ppm").string()), std::runtime_error);
}

TEST_CASE("save_image dispatches on extension") {
    RawImage img = testsup::random_noise_image(4, 4, 3);
    const fs::path pp = temp_dir() / "disp.ppm";
    const fs::path pn = temp_dir() / "disp.png";
    save_image(img, pp.string());
    save_image(img, pn.string());
    CHECK(load_image(pp.string()).image.pixels == img.pixels);
    CHECK(load_image(pn.string()).image.pixels == img.pixels);
    CHECK_THROWS_AS(save_image(img, (temp_dir() / "disp.bmp").string()), std::runtime_error);
}

TEST_CASE("palette text writer rounds half up and clamps") {
    Palette pal;
    pal.colors = {{0.4, 127.5, 255.0}, {-3.0, 254.5, 300.0}};
    const fs::path p = temp_dir() / "pal.txt";
    save_palette_text(pal, p.string());
    CHECK(slurp(p) == "0 128 255\n0 255 255\n");

    Palette empty;
    CHECK_THROWS_AS(save_palette_text(empty, (temp_dir() / "pal2.txt").string()),
                    std::invalid_argument);
}
