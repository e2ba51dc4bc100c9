#include <doctest.h>

#include "podforge/augment.hpp"
#include "podforge/rng.hpp"

using namespace podforge;

namespace {

Image random_image(Rng& rng, int w, int h) {
    Image img(w, h, 3);
    for (auto& v : img.data) v = static_cast<std::uint8_t>(rng.next_index(256));
    return img;
}

InstanceAnnotation square_annotation(int w, int h, int bx, int by, int bw, int bh) {
    std::vector<std::uint8_t> bits(static_cast<std::size_t>(w) * h, 0);
    for (int y = by; y < by + bh; ++y)
        for (int x = bx; x < bx + bw; ++x) bits[static_cast<std::size_t>(y) * w + x] = 1;
    InstanceAnnotation ann;
    ann.segmentation = rle_encode(bits, w, h);
    ann.area = rle_area(ann.segmentation);
    ann.bbox = {double(bx), double(by), double(bw), double(bh)};
    return ann;
}

double mean_intensity(const Image& img) {
    double sum = 0;
    for (std::uint8_t v : img.data) sum += v;
    return sum / img.data.size();
}

}  // namespace

TEST_CASE("flip_ud is an involution on image and annotations") {
    Rng rng(1);
    const Image img = random_image(rng, 31, 23);
    const auto ann = square_annotation(31, 23, 4, 3, 7, 9);

    auto [img1, anns1] = apply(AugmentSpec::flip_ud(), img, {ann});
    CHECK(img1 != img);
    auto [img2, anns2] = apply(AugmentSpec::flip_ud(), img1, anns1);
    CHECK(img2 == img);
    CHECK(anns2[0].segmentation == ann.segmentation);
    CHECK(anns2[0].bbox.y == ann.bbox.y);

    // single flip moves the bbox to the mirrored row
    CHECK(anns1[0].bbox.y == 23 - 3 - 9);
    CHECK(anns1[0].area == ann.area);
}

TEST_CASE("brightness 1.0 is the identity; photometric ops keep annotations") {
    Rng rng(2);
    const Image img = random_image(rng, 16, 16);
    const auto ann = square_annotation(16, 16, 2, 2, 5, 5);
    auto [out, anns] = apply(AugmentSpec::brightness_of(1.0), img, {ann});
    CHECK(out == img);
    CHECK(anns[0] == ann);

    auto [blurred, anns2] = apply(AugmentSpec::gaussian_blur(1.5), img, {ann});
    CHECK(anns2[0] == ann);
}

TEST_CASE("brightness clamps and rejects non-positive factors") {
    Image img(4, 4, 3, 200);
    auto [out, _] = apply(AugmentSpec::brightness_of(2.0), img, {});
    CHECK(out.data[0] == 255);
    CHECK_THROWS_AS(apply(AugmentSpec::brightness_of(0.0), img, {}), InvalidArgument);
}

TEST_CASE("gaussian blur of a constant image is the same constant image") {
    Image img(24, 24, 3, 97);
    auto [out, _] = apply(AugmentSpec::gaussian_blur(2.0), img, {});
    CHECK(out == img);
}

TEST_CASE("gaussian blur preserves the global mean within half a gray level") {
    Rng rng(3);
    const Image img = random_image(rng, 64, 64);  // >= 6 sigma wide
    auto [out, _] = apply(AugmentSpec::gaussian_blur(2.0), img, {});
    CHECK(std::abs(mean_intensity(out) - mean_intensity(img)) < 0.5);
}

TEST_CASE("rotation by 90-degree multiples preserves per-instance area") {
    Rng rng(4);
    const Image img = random_image(rng, 20, 12);
    const auto ann = square_annotation(20, 12, 3, 2, 6, 4);
    for (double deg : {90.0, 180.0, 270.0}) {
        auto [out, anns] = apply(AugmentSpec::rotate(deg), img, {ann});
        CHECK(anns[0].area == ann.area);
        const bool swapped = deg != 180.0;
        CHECK(out.width == (swapped ? img.height : img.width));
        CHECK(out.height == (swapped ? img.width : img.height));
        CHECK(anns[0].segmentation.width == out.width);
    }
    // four quarter turns come back to the start
    Image cur = img;
    std::vector<InstanceAnnotation> anns = {ann};
    for (int i = 0; i < 4; ++i) std::tie(cur, anns) = apply(AugmentSpec::rotate(90), cur, anns);
    CHECK(cur == img);
    CHECK(anns[0].segmentation == ann.segmentation);
}

TEST_CASE("free-angle rotation is rejected") {
    Image img(8, 8, 3);
    CHECK_THROWS_AS(apply(AugmentSpec::rotate(45), img, {}), InvalidArgument);
}

TEST_CASE("resize maps a 3024x4032 frame to 768x1024") {
    Image img(3024, 4032, 3, 50);
    auto [out, _] = resize(img, {}, 1024);
    CHECK(out.width == 768);
    CHECK(out.height == 1024);
}

TEST_CASE("resize scales bboxes linearly and is identity at the current size") {
    Image img(200, 400, 3, 10);
    InstanceAnnotation ann;
    ann.bbox = {100, 200, 50, 50};
    auto [out, anns] = resize(img, {ann}, 200);
    CHECK(out.width == 100);
    CHECK(anns[0].bbox.x == doctest::Approx(50));
    CHECK(anns[0].bbox.y == doctest::Approx(100));
    CHECK(anns[0].bbox.w == doctest::Approx(25));
    CHECK(anns[0].bbox.h == doctest::Approx(25));

    auto [same, anns2] = resize(img, {ann}, 400);
    CHECK(same == img);
    CHECK(anns2[0].bbox.x == ann.bbox.x);

    CHECK_THROWS_AS(resize(img, {}, 800), InvalidArgument);
}

TEST_CASE("resize resamples masks nearest-neighbor with consistent dimensions") {
    const auto ann = square_annotation(40, 40, 10, 10, 20, 20);
    Image img(40, 40, 3, 77);
    auto [out, anns] = resize(img, {ann}, 20);
    CHECK(anns[0].segmentation.width == 20);
    CHECK(anns[0].segmentation.height == 20);
    CHECK(anns[0].area == 100);  // half-scale square keeps exact area / 4
}
