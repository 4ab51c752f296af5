#include "doctest.h"

#include <cmath>

#include "pstereo/pyramid.hpp"
#include "pstereo/window_posterior.hpp"

using namespace pstereo;

namespace {

WindowSamples window_of(std::vector<double> residuals) {
  WindowSamples w;
  const int n = int(residuals.size());
  const int c = n / 2;
  for (int i = 0; i < n; ++i) w.offsets.push_back(0.5 * (i - c));
  w.residuals = std::move(residuals);
  w.valid.assign(std::size_t(n), 1);
  w.center_index = c;
  return w;
}

double tex(double x, double y) {
  return 0.5 + 0.2 * std::sin(x * 0.37 + 0.8) + 0.15 * std::sin(y * 0.29) +
         0.1 * std::sin((x + y) * 0.143);
}

GrayImage analytic_image(int w, int h) {
  GrayImage img = make_gray(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) img.at(x, y) = float(tex(x, y));
  return img;
}

PatchSystem system_at(const GrayImage& left, double cx, double cy, int size) {
  const auto patch = extract_patch(left, cx, cy, size);
  REQUIRE(patch.has_value());
  const std::vector<float> grad = gradient_x(left);
  return precompute_patch_system(*patch, grad, left.width, left.height, 0);
}

}  // namespace

TEST_CASE("the residual spread is the population standard deviation") {
  CHECK(dynamic_sigma(window_of({0, 1, 2, 3, 4})) ==
        doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  CHECK(dynamic_sigma(window_of({0, 0, 0, 0, 1})) ==
        doctest::Approx(0.4).epsilon(1e-12));
}

TEST_CASE("identical residuals fall back to the spread floor") {
  CHECK(dynamic_sigma(window_of({0.3, 0.3, 0.3, 0.3, 0.3})) == 1e-4);
  CHECK(dynamic_sigma(window_of({0, 0, 0, 0, 0})) == 1e-4);
}

TEST_CASE("invalid samples are excluded from the spread") {
  WindowSamples w = window_of({0, 1, 2, 3, 1e9});
  w.valid[4] = 0;
  // Population std of {0, 1, 2, 3}.
  CHECK(dynamic_sigma(w) == doctest::Approx(std::sqrt(1.25)).epsilon(1e-12));
}

TEST_CASE("window weights follow the Boltzmann form") {
  const WindowSamples w = window_of({2, 1, 0, 1, 2});
  // sigma_r = 1 and patch size 1 make the exponent -residual / 2.
  const std::vector<double> prior = window_priors(w, 1.0, 1, false);
  CHECK(prior[2] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(prior[1] == doctest::Approx(std::exp(-0.5)).epsilon(1e-12));
  CHECK(prior[0] == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
  CHECK(prior[1] == prior[3]);
  CHECK(prior[0] == prior[4]);
}

TEST_CASE("invalid samples get zero weight") {
  WindowSamples w = window_of({2, 1, 0, 1, 2});
  w.valid[0] = 0;
  const std::vector<double> prior = window_priors(w, 1.0, 1, false);
  CHECK(prior[0] == 0.0);
  CHECK(prior[4] > 0.0);
}

TEST_CASE("the normalized posterior matches the hand-computed value") {
  // Residuals {2,1,0,1,2}, exponent -r/2: weights {e^-1, e^-.5, 1, e^-.5,
  // e^-1} normalize the center to 1 / (1 + 2e^-.5 + 2e^-1) = 0.3391189...
  const WindowSamples w = window_of({2, 1, 0, 1, 2});
  const auto post = patch_posterior(w, 1.0, 1, false);
  REQUIRE(post.has_value());
  CHECK(post->probability == doctest::Approx(0.3391189).epsilon(1e-6));
  CHECK(post->is_local_minimum);
  CHECK(post->sigma_r == 1.0);
}

TEST_CASE("the fast-exponential posterior stays within its error budget") {
  const WindowSamples w = window_of({2, 1, 0, 1, 2});
  const auto post = patch_posterior(w, 1.0, 1, true);
  REQUIRE(post.has_value());
  // Each weight is off by at most 4%, so the ratio is off by under ~8.5%.
  CHECK(post->probability == doctest::Approx(0.3391189).epsilon(0.085));
}

TEST_CASE("a flat window spreads the posterior uniformly") {
  const WindowSamples w = window_of({0.5, 0.5, 0.5, 0.5, 0.5});
  const auto post = patch_posterior(w, 1.0, 1, false);
  REQUIRE(post.has_value());
  CHECK(post->probability == doctest::Approx(0.2).epsilon(1e-12));
  CHECK_FALSE(post->is_local_minimum);  // ties are not strict minima
}

TEST_CASE("posterior is scale invariant in the residual units") {
  const WindowSamples a = window_of({2, 1, 0, 1, 2});
  const WindowSamples b = window_of({8, 4, 0, 4, 8});
  const auto pa = patch_posterior(a, 1.0, 1, false);
  const auto pb = patch_posterior(b, 2.0, 1, false);
  REQUIRE(pa.has_value());
  REQUIRE(pb.has_value());
  CHECK(pa->probability == doctest::Approx(pb->probability).epsilon(1e-12));
}

TEST_CASE("the dynamic spread keeps the exponent in residual units") {
  // The exponent is -r / (2 sigma^2): scaling the residuals by c scales the
  // spread by c too, so the exponent shrinks by 1/c. Small-residual windows
  // therefore concentrate more than same-shaped large-residual ones.
  const WindowSamples small = window_of({0.2, 0.1, 0, 0.1, 0.2});
  const WindowSamples large = window_of({20, 10, 0, 10, 20});
  const auto ps = patch_posterior(small, dynamic_sigma(small), 1, false);
  const auto pl = patch_posterior(large, dynamic_sigma(large), 1, false);
  REQUIRE(ps.has_value());
  REQUIRE(pl.has_value());
  CHECK(ps->probability > pl->probability);
  CHECK(pl->probability > 0.2);  // still above uniform: center is the minimum
}

TEST_CASE("an off-center minimum is flagged") {
  const WindowSamples w = window_of({0, 1, 2, 1, 2});
  const auto post = patch_posterior(w, dynamic_sigma(w), 1, false);
  REQUIRE(post.has_value());
  CHECK_FALSE(post->is_local_minimum);
}

TEST_CASE("total underflow is reported rather than divided by zero") {
  const WindowSamples w = window_of({1e9, 1e9, 1e8, 1e9, 1e9});
  CHECK_FALSE(patch_posterior(w, 1e-4, 1, true).has_value());
  CHECK_FALSE(patch_posterior(w, 1e-4, 1, false).has_value());
}

TEST_CASE("window sampling around a converged solve") {
  const GrayImage img = analytic_image(64, 48);
  const PatchSystem sys = system_at(img, 31.5, 23.5, 10);
  LkScratch scratch;
  const std::vector<double> magnitudes = {1.0, 0.5};  // order must not matter
  const auto w = sample_window(sys, img, 0.0, magnitudes, scratch);
  REQUIRE(w.has_value());
  REQUIRE(w->offsets.size() == 5);
  CHECK(w->offsets[0] == -1.0);
  CHECK(w->offsets[1] == -0.5);
  CHECK(w->offsets[2] == 0.0);
  CHECK(w->offsets[3] == 0.5);
  CHECK(w->offsets[4] == 1.0);
  CHECK(w->center_index == 2);
  CHECK(w->valid_count() == 5);
  CHECK(w->residuals[2] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(w->residuals[0] > w->residuals[1]);
  CHECK(w->residuals[4] > w->residuals[3]);
  CHECK(w->residuals[1] > 0.0);

  const auto post = patch_posterior(*w, dynamic_sigma(*w), 10);
  REQUIRE(post.has_value());
  CHECK(post->is_local_minimum);
}

TEST_CASE("window samples that leave the image are dropped or fatal") {
  const GrayImage img = analytic_image(64, 48);
  const PatchSystem sys = system_at(img, 5.5, 23.5, 10);
  LkScratch scratch;
  const std::vector<double> magnitudes = {0.5, 1.0};

  // Template column runs from x = 1; disparity 0.4 pushes the +1 offset
  // sample to x = -0.4: exactly one invalid sample, window survives.
  auto w = sample_window(sys, img, 0.4, magnitudes, scratch);
  REQUIRE(w.has_value());
  CHECK(w->valid_count() == 4);
  CHECK(w->valid[4] == 0);

  // Disparity 1.4 also pushes the +0.5 sample out: two invalid, dropped.
  CHECK_FALSE(sample_window(sys, img, 1.4, magnitudes, scratch).has_value());

  // A center sample outside the image is always fatal.
  CHECK_FALSE(sample_window(sys, img, 7.0, magnitudes, scratch).has_value());
}
