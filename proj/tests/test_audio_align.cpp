#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <set>

#include "avatarforge/audio_align.hpp"
#include "avatarforge/rng.hpp"
#include "support/generators.hpp"

using namespace avatarforge;

namespace {

Tensor stack_filled(std::int64_t frames, std::int64_t dim, float value) {
  Tensor t({kEncoderLayerCount, frames, dim});
  for (float& v : t.data()) v = value;
  return t;
}

Tensor random_tensor(Rng& rng, std::vector<std::int64_t> shape) {
  Tensor t(std::move(shape));
  for (float& v : t.data()) v = static_cast<float>(rng.next_range(-2.0, 2.0));
  return t;
}

}  // namespace

TEST_CASE("split_windows tiles the 50 Hz timeline") {
  CHECK(split_windows(3000, 1500) == std::vector<WindowSpan>{{0, 1500}, {1500, 1500}});
  CHECK(split_windows(1600, 1500) == std::vector<WindowSpan>{{0, 1500}, {1500, 100}});
  CHECK(split_windows(100, 1500) == std::vector<WindowSpan>{{0, 100}});
  CHECK_THROWS_AS(split_windows(0, 1500), Error);

  SUBCASE("windows are contiguous and cover the total") {
    Rng rng(1);
    for (int trial = 0; trial < 50; ++trial) {
      const std::int64_t total = 1 + static_cast<std::int64_t>(rng.next_below(10000));
      const std::int64_t window = 1 + static_cast<std::int64_t>(rng.next_below(2000));
      const auto spans = split_windows(total, window);
      std::int64_t cursor = 0;
      for (const WindowSpan& s : spans) {
        CHECK(s.start == cursor);
        CHECK(s.length >= 1);
        CHECK(s.length <= window);
        cursor += s.length;
      }
      CHECK(cursor == total);
    }
  }
}

TEST_CASE("group_pool means four 8-layer groups plus the final layer") {
  SUBCASE("constant stacks pool to the same constant") {
    const Tensor pooled = group_pool(stack_filled(4, 3, 2.5f));
    CHECK(pooled.shape() == std::vector<std::int64_t>{4, kPooledChannels, 3});
    for (float v : pooled.data()) CHECK(v == 2.5f);
  }
  SUBCASE("layer index as value gives channel means [3.5, 11.5, 19.5, 27.5, 32]") {
    Tensor stack({kEncoderLayerCount, 2, 2});
    for (std::int64_t layer = 0; layer < kEncoderLayerCount; ++layer)
      for (std::int64_t f = 0; f < 2; ++f)
        for (std::int64_t d = 0; d < 2; ++d) stack.at3(layer, f, d) = static_cast<float>(layer);
    const Tensor pooled = group_pool(stack);
    const float expected[] = {3.5f, 11.5f, 19.5f, 27.5f, 32.0f};
    for (std::int64_t f = 0; f < 2; ++f)
      for (std::int64_t c = 0; c < kPooledChannels; ++c)
        for (std::int64_t d = 0; d < 2; ++d) CHECK(pooled.at3(f, c, d) == expected[c]);
  }
  SUBCASE("wrong layer count is rejected") {
    CHECK_THROWS_AS(group_pool(Tensor({32, 4, 8})), Error);
    try {
      group_pool(Tensor({34, 4, 8}));
      FAIL("expected WrongLayerCount");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::WrongLayerCount);
    }
  }
  SUBCASE("pooling is linear over 100 random tensor pairs") {
    Rng rng(21);
    for (int trial = 0; trial < 100; ++trial) {
      const std::int64_t frames = 1 + static_cast<std::int64_t>(rng.next_below(6));
      const std::int64_t dim = 1 + static_cast<std::int64_t>(rng.next_below(8));
      const Tensor x = random_tensor(rng, {kEncoderLayerCount, frames, dim});
      const Tensor y = random_tensor(rng, {kEncoderLayerCount, frames, dim});
      const double a = rng.next_range(-2.0, 2.0), b = rng.next_range(-2.0, 2.0);

      Tensor combo({kEncoderLayerCount, frames, dim});
      for (std::size_t i = 0; i < combo.size(); ++i)
        combo.data()[i] = static_cast<float>(a * x.data()[i] + b * y.data()[i]);

      const Tensor lhs = group_pool(combo);
      const Tensor px = group_pool(x), py = group_pool(y);
      for (std::size_t i = 0; i < lhs.size(); ++i) {
        const double rhs = a * px.data()[i] + b * py.data()[i];
        const double denom = std::max(1.0, std::abs(rhs));
        CHECK(std::abs(lhs.data()[i] - rhs) / denom <= 1e-6);
      }
    }
  }
}

TEST_CASE("resample_linear endpoint-aligned interpolation") {
  SUBCASE("identity when target equals source") {
    Rng rng(5);
    const Tensor src = random_tensor(rng, {7, kPooledChannels, 3});
    CHECK(resample_linear(src, 7) == src);
  }
  SUBCASE("single source frame broadcasts") {
    Rng rng(6);
    const Tensor src = random_tensor(rng, {1, kPooledChannels, 4});
    const Tensor out = resample_linear(src, 5);
    for (std::int64_t t = 0; t < 5; ++t)
      for (std::int64_t c = 0; c < kPooledChannels; ++c)
        for (std::int64_t d = 0; d < 4; ++d) CHECK(out.at3(t, c, d) == src.at3(0, c, d));
  }
  SUBCASE("target of one takes source frame zero") {
    Rng rng(7);
    const Tensor src = random_tensor(rng, {9, kPooledChannels, 2});
    const Tensor out = resample_linear(src, 1);
    for (std::int64_t c = 0; c < kPooledChannels; ++c)
      for (std::int64_t d = 0; d < 2; ++d) CHECK(out.at3(0, c, d) == src.at3(0, c, d));
  }
  SUBCASE("arithmetic ramp follows the closed form") {
    const std::int64_t source_frames = 12, target = 6;
    Tensor src({source_frames, 1, 1});
    for (std::int64_t f = 0; f < source_frames; ++f) src.at3(f, 0, 0) = static_cast<float>(f);
    const Tensor out = resample_linear(src, target);
    for (std::int64_t t = 0; t < target; ++t) {
      const double expected = static_cast<double>(t) * (source_frames - 1) / (target - 1);
      CHECK(out.at3(t, 0, 0) == doctest::Approx(expected).epsilon(1e-6));
    }
    // endpoints align exactly
    CHECK(out.at3(0, 0, 0) == 0.0f);
    CHECK(out.at3(target - 1, 0, 0) == static_cast<float>(source_frames - 1));
  }
  SUBCASE("outputs stay inside per-slot bounds (convex combinations)") {
    Rng rng(8);
    for (int trial = 0; trial < 30; ++trial) {
      const std::int64_t F = 2 + static_cast<std::int64_t>(rng.next_below(40));
      const std::int64_t T = 1 + static_cast<std::int64_t>(rng.next_below(60));
      const Tensor src = random_tensor(rng, {F, 2, 3});
      const Tensor out = resample_linear(src, T);
      for (std::int64_t c = 0; c < 2; ++c) {
        for (std::int64_t d = 0; d < 3; ++d) {
          float lo = src.at3(0, c, d), hi = src.at3(0, c, d);
          for (std::int64_t f = 1; f < F; ++f) {
            lo = std::min(lo, src.at3(f, c, d));
            hi = std::max(hi, src.at3(f, c, d));
          }
          for (std::int64_t t = 0; t < T; ++t) {
            CHECK(out.at3(t, c, d) >= lo - 1e-6f);
            CHECK(out.at3(t, c, d) <= hi + 1e-6f);
          }
        }
      }
    }
  }
}

TEST_CASE("compress_to_latent follows the 1 + ceil((T-1)/4) convention") {
  CHECK(latent_length(93) == 24);
  CHECK(latent_length(1) == 1);
  CHECK(latent_length(2) == 2);
  CHECK(latent_length(5) == 2);
  CHECK(latent_length(6) == 3);

  SUBCASE("T = 1 is the identity") {
    Rng rng(9);
    const Tensor src = random_tensor(rng, {1, kPooledChannels, 3});
    CHECK(compress_to_latent(src) == src);
  }
  SUBCASE("constant input stays constant") {
    Tensor src({13, 2, 2});
    for (float& v : src.data()) v = 0.75f;
    const Tensor latent = compress_to_latent(src);
    CHECK(latent.dim(0) == latent_length(13));
    for (float v : latent.data()) CHECK(v == 0.75f);
  }
  SUBCASE("latent frame 0 is video frame 0 and groups average exact ranges") {
    Tensor src({9, 1, 1});
    for (std::int64_t f = 0; f < 9; ++f) src.at3(f, 0, 0) = static_cast<float>(f);
    const Tensor latent = compress_to_latent(src);
    REQUIRE(latent.dim(0) == 3);
    CHECK(latent.at3(0, 0, 0) == 0.0f);
    CHECK(latent.at3(1, 0, 0) == doctest::Approx((1 + 2 + 3 + 4) / 4.0));
    CHECK(latent.at3(2, 0, 0) == doctest::Approx((5 + 6 + 7 + 8) / 4.0));
  }
  SUBCASE("short tail group averages only the remaining frames") {
    Tensor src({7, 1, 1});
    for (std::int64_t f = 0; f < 7; ++f) src.at3(f, 0, 0) = static_cast<float>(f);
    const Tensor latent = compress_to_latent(src);
    REQUIRE(latent.dim(0) == latent_length(7));  // 1 + ceil(6/4) = 3
    CHECK(latent.at3(2, 0, 0) == doctest::Approx((5 + 6) / 2.0));
  }
  SUBCASE("size-weighted latent mean equals the input mean exactly when T = 1 mod 4") {
    for (std::int64_t T : {5, 13, 93}) {
      Tensor src({T, 1, 1});
      Rng rng(static_cast<std::uint64_t>(T));
      for (float& v : src.data()) v = static_cast<float>(rng.next_below(32));  // small integers
      const Tensor latent = compress_to_latent(src);

      double weighted = static_cast<double>(latent.at3(0, 0, 0));
      for (std::int64_t j = 1; j < latent.dim(0); ++j)
        weighted += 4.0 * static_cast<double>(latent.at3(j, 0, 0));
      double input_sum = 0;
      for (float v : src.data()) input_sum += v;
      CHECK(weighted == input_sum);  // exact in double for integer inputs
    }
  }
}

TEST_CASE("stub encoder is deterministic and window-distinct") {
  const Tensor a = stub_encode(40, 7, 0, 16);
  const Tensor b = stub_encode(40, 7, 0, 16);
  CHECK(a == b);
  CHECK(a.shape() == std::vector<std::int64_t>{kEncoderLayerCount, 40, 16});

  SUBCASE("different window indices give different stacks") {
    std::set<std::string> digests;
    for (std::int64_t w = 0; w < 100; ++w) {
      const Tensor t = stub_encode(4, 7, w, 4);
      std::string bytes(t.size() * sizeof(float), '\0');
      std::memcpy(bytes.data(), t.data().data(), bytes.size());
      digests.insert(bytes);
    }
    CHECK(digests.size() == 100);
  }
  SUBCASE("different seeds give different stacks") {
    CHECK_FALSE(stub_encode(8, 1, 0, 4) == stub_encode(8, 2, 0, 4));
  }
}

TEST_CASE("end-to-end shape law over random durations") {
  Rng rng(99);
  for (int trial = 0; trial < 12; ++trial) {
    const double duration = rng.next_range(0.2, 90.0);
    const std::int64_t F = encoder_frames_for_duration(duration);
    const std::int64_t T = video_frames_for_duration(duration);
    if (F < 1 || T < 1) continue;
    CHECK(F == std::llround(50.0 * duration));
    CHECK(T == std::llround(25.0 * duration));

    const std::int64_t dim = 8;
    const AlignedAudio out = align_audio(
        F, T, [&](const WindowSpan& w, std::int64_t index) { return stub_encode(w.length, 7, index, dim); });
    CHECK(out.pooled.shape() == std::vector<std::int64_t>{F, kPooledChannels, dim});
    CHECK(out.aligned.shape() == std::vector<std::int64_t>{T, kPooledChannels, dim});
    CHECK(out.latent.shape() ==
          std::vector<std::int64_t>{1 + (T - 1 + 3) / 4, kPooledChannels, dim});
  }
}

TEST_CASE("windowed encoding concatenates in order") {
  // Encoder writes the absolute 50 Hz frame index; concatenation must
  // reconstruct the full ramp regardless of window boundaries.
  const std::int64_t total = 130, window = 50;
  const AlignedAudio out = align_audio(
      total, 65,
      [&](const WindowSpan& w, std::int64_t) {
        Tensor stack({kEncoderLayerCount, w.length, 1});
        for (std::int64_t layer = 0; layer < kEncoderLayerCount; ++layer)
          for (std::int64_t f = 0; f < w.length; ++f)
            stack.at3(layer, f, 0) = static_cast<float>(w.start + f);
        return stack;
      },
      window);
  for (std::int64_t f = 0; f < total; ++f)
    for (std::int64_t c = 0; c < kPooledChannels; ++c)
      CHECK(out.pooled.at3(f, c, 0) == static_cast<float>(f));
}

TEST_CASE("tensor interchange round trip is bit exact") {
  avatarforge::testing::TempDir tmp("tensor");
  Rng rng(123);
  Tensor t({3, 5, 7});
  for (float& v : t.data()) v = static_cast<float>(rng.next_range(-1e6, 1e6));
  t.data()[0] = 0.0f;
  t.data()[1] = -0.0f;
  t.data()[2] = 1e-42f;  // subnormal

  const std::string path = tmp.file("t.bin");
  save_tensor(t, path);
  const Tensor back = load_tensor(path);
  REQUIRE(back.shape() == t.shape());
  CHECK(std::memcmp(back.data().data(), t.data().data(), t.size() * sizeof(float)) == 0);

  SUBCASE("payload shorter than the sidecar shape is rejected") {
    save_tensor(t, tmp.file("short.bin"));
    std::ofstream truncate(tmp.file("short.bin"), std::ios::binary | std::ios::trunc);
    truncate << "xx";
    truncate.close();
    CHECK_THROWS_AS(load_tensor(tmp.file("short.bin")), Error);
  }
}
