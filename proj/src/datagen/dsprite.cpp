#include "dfpv/datagen/dsprite.hpp"

#include <cmath>
#include <numbers>

#include "dfpv/errors.hpp"
#include "dfpv/numkit/random.hpp"

namespace dfpv::datagen {

namespace {

constexpr std::size_t kReadoutRows = 10;
constexpr std::size_t kCalibrationDraws = 100000;
constexpr double kFrequencyScale = 3.0;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

SpriteLatents draw_latents(numkit::CounterRng& rng) {
  const double scale = rng.uniform(0.5, 1.0);
  const double rotation = rng.uniform(0.0, kTwoPi);
  const double pos_x = rng.uniform();
  const double pos_y = rng.uniform();
  return {scale, rotation, pos_x, pos_y};
}

double readout_norm_sq(const DenseMatrix& b, std::span<const double> a) {
  double s = 0.0;
  for (std::size_t r = 0; r < b.rows(); ++r) {
    double t = 0.0;
    for (std::size_t j = 0; j < b.cols(); ++j) t += b(r, j) * a[j];
    s += t * t;
  }
  return s;
}

}  // namespace

SpriteSurrogate::SpriteSurrogate(std::size_t embed_dim, std::uint64_t seed)
    : omega_(embed_dim, 4), phase_(embed_dim), b_(kReadoutRows, embed_dim) {
  if (embed_dim < 8) throw InvalidArgument("SpriteSurrogate: embed_dim must be >= 8");
  numkit::CounterRng rng(seed, 10);
  for (std::size_t j = 0; j < embed_dim; ++j) {
    for (std::size_t k = 0; k < 4; ++k) omega_(j, k) = kFrequencyScale * rng.normal();
    phase_[j] = rng.uniform(0.0, kTwoPi);
  }
  numkit::CounterRng brng(seed, 11);
  for (double& v : b_.data()) v = brng.uniform();

  // Rescale B so that ||B A||^2 averages 5000 over noisy treatments.
  numkit::CounterRng crng(seed, 12);
  const double sd = std::sqrt(kSpriteNoiseVariance);
  double sum = 0.0;
  for (std::size_t s = 0; s < kCalibrationDraws; ++s) {
    Vector a = embed(draw_latents(crng));
    for (double& x : a) x += sd * crng.normal();
    sum += readout_norm_sq(b_, a);
  }
  raw_mean_ = sum / static_cast<double>(kCalibrationDraws);
  const double factor = std::sqrt(5000.0 / raw_mean_);
  for (double& v : b_.data()) v *= factor;
}

Vector SpriteSurrogate::embed(const SpriteLatents& l) const {
  const double x[4] = {(l.scale - 0.5) / 0.5, l.rotation / kTwoPi, l.pos_x, l.pos_y};
  Vector e(embed_dim());
  for (std::size_t j = 0; j < e.size(); ++j) {
    double t = phase_[j];
    for (std::size_t k = 0; k < 4; ++k) t += omega_(j, k) * x[k];
    e[j] = std::cos(t);
  }
  return e;
}

double SpriteSurrogate::structural(std::span<const double> a) const {
  if (a.size() != embed_dim()) throw InvalidArgument("SpriteSurrogate::structural: dimension mismatch");
  return (readout_norm_sq(b_, a) - 5000.0) / 1000.0;
}

ObservationSet gen_dsprite_surrogate(const SpriteSurrogate& sprite, std::size_t n_stage1, std::size_t n_stage2,
                                     std::uint64_t seed) {
  if (n_stage1 == 0 || n_stage2 == 0) throw InvalidArgument("gen_dsprite_surrogate: stage sizes must be >= 1");
  const std::size_t d = sprite.embed_dim();
  const double sd = std::sqrt(kSpriteNoiseVariance);
  const double eps_sd = std::sqrt(0.5);
  auto draw = [&](std::size_t n, std::uint64_t stream) {
    numkit::CounterRng rng(seed, stream);
    Split s{DenseMatrix(n, d), DenseMatrix(n, 3), DenseMatrix(n, d), Vector(n)};
    for (std::size_t i = 0; i < n; ++i) {
      const auto l = draw_latents(rng);
      const Vector a = sprite.embed(l);
      const Vector w = sprite.embed({0.8, 0.0, 0.5, l.pos_y});
      for (std::size_t j = 0; j < d; ++j) {
        s.a(i, j) = a[j] + sd * rng.normal();
        s.w(i, j) = w[j] + sd * rng.normal();
      }
      s.z(i, 0) = l.scale;
      s.z(i, 1) = l.rotation;
      s.z(i, 2) = l.pos_x;
      const double c = l.pos_y - 0.5;
      s.y[i] = 12.0 * c * c * sprite.structural(s.a.row(i)) + eps_sd * rng.normal();
    }
    return s;
  };
  ObservationSet out;
  out.stage1 = draw(n_stage1, 1);
  out.stage2 = draw(n_stage2, 2);
  return out;
}

GroundTruth dsprite_truth(const SpriteSurrogate& sprite) {
  const double pos[2] = {0.25, 0.75};
  const double scales[3] = {0.5, 0.75, 1.0};
  GroundTruth t;
  t.grid = DenseMatrix(48, sprite.embed_dim());
  std::size_t r = 0;
  for (double px : pos)
    for (double py : pos)
      for (double sc : scales)
        for (int k = 0; k < 4; ++k) {
          const Vector a = sprite.embed({sc, kTwoPi * k / 4.0, px, py});
          std::copy(a.begin(), a.end(), t.grid.row(r).begin());
          t.values.push_back(sprite.structural(a));
          ++r;
        }
  t.mc_stderr.assign(48, 0.0);
  return t;
}

}  // namespace dfpv::datagen
