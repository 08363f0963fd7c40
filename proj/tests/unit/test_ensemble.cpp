#include "rmtlab/ensemble.hpp"
#include "rmtlab/errors.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace rmtlab;

namespace {

EnsembleSpec spec_of(std::size_t n, EntryLaw law, ScalarField field = ScalarField::real) {
  EnsembleSpec s;
  s.dimension = n;
  s.law = law;
  s.field = field;
  return s;
}

}  // namespace

TEST(Ensemble, SameSeedSameMatrix) {
  const auto s = spec_of(2, EntryLaw::gaussian);
  EXPECT_EQ(sample_matrix(s, 7).entries, sample_matrix(s, 7).entries);
  EXPECT_NE(sample_matrix(s, 7).entries, sample_matrix(s, 8).entries);
}

TEST(Ensemble, BernoulliSupport) {
  const auto x = sample_matrix(spec_of(100, EntryLaw::bernoulli), 1).entries;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    EXPECT_DOUBLE_EQ(std::abs(x.data()[i].real()), 0.1);
    EXPECT_EQ(x.data()[i].imag(), 0.0);
  }
}

TEST(Ensemble, PooledVarianceGaussian) {
  const auto s = spec_of(500, EntryLaw::gaussian);
  double sum2 = 0.0;
  double count = 0.0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto x = sample_matrix(s, seed).entries;
    sum2 += x.squaredNorm();
    count += double(x.size());
  }
  const double var = 500.0 * sum2 / count;
  EXPECT_GT(var, 0.95);
  EXPECT_LT(var, 1.05);
}

TEST(Ensemble, MomentsMatchLaws) {
  for (EntryLaw law : {EntryLaw::gaussian, EntryLaw::bernoulli, EntryLaw::laplace, EntryLaw::uniform,
                       EntryLaw::two_point_asymmetric}) {
    const auto rep = moment_report(sample_matrix(spec_of(1000, law), 11));
    const auto exact = law_moments(law).moments;
    for (int k = 0; k < 4; ++k)
      EXPECT_NEAR(rep.moments[k], exact[k], 4.0 * rep.std_errors[k] + 1e-12) << to_string(law) << " k=" << k + 1;
  }
}

TEST(Ensemble, BernoulliEvenMomentsExact) {
  const auto rep = moment_report(sample_matrix(spec_of(1000, EntryLaw::bernoulli), 2));
  EXPECT_NEAR(rep.moments[1], 1.0, 1e-12);
  EXPECT_NEAR(rep.moments[3], 1.0, 1e-12);
}

TEST(Ensemble, TwoPointLawMoments) {
  const auto m = law_moments(EntryLaw::two_point_asymmetric).moments;
  EXPECT_DOUBLE_EQ(m[0], 0.0);
  EXPECT_DOUBLE_EQ(m[1], 1.0);
  EXPECT_DOUBLE_EQ(m[2], 1.5);
  EXPECT_DOUBLE_EQ(m[3], 3.25);
}

TEST(Ensemble, FirstMomentGaussianWithinClt) {
  const auto rep = moment_report(sample_matrix(spec_of(1000, EntryLaw::gaussian), 5));
  EXPECT_LT(std::abs(rep.moments[0]), 0.004);
}

TEST(Ensemble, VanishingThirdMomentValidation) {
  auto s = spec_of(10, EntryLaw::two_point_asymmetric);
  s.third_moment = ThirdMomentMode::vanishing;
  EXPECT_THROW(s.validate(), InvalidArgument);
  s.law = EntryLaw::laplace;
  EXPECT_NO_THROW(s.validate());
  EXPECT_THROW(spec_of(0, EntryLaw::gaussian).validate(), InvalidArgument);
}

TEST(Ensemble, SubexponentialTailBound) {
  for (EntryLaw law : {EntryLaw::gaussian, EntryLaw::bernoulli, EntryLaw::laplace, EntryLaw::uniform,
                       EntryLaw::two_point_asymmetric}) {
    const double theta = law_moments(law).theta;
    const auto s = spec_of(1000, law);
    std::array<double, 3> exceed{};
    const std::array<double, 3> lambda{2.0, 4.0, 6.0};
    double count = 0.0;
    for (std::uint64_t seed = 0; seed < 1; ++seed) {
      const auto x = sample_matrix(s, seed).entries;
      for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double v = std::abs(x.data()[i]) * std::sqrt(1000.0);
        for (int k = 0; k < 3; ++k) exceed[k] += v > lambda[k];
      }
      count += double(x.size());
    }
    for (int k = 0; k < 3; ++k) {
      const double bound = std::exp(-std::pow(lambda[k], theta)) / theta;
      EXPECT_LE(exceed[k] / count, bound) << to_string(law) << " lambda=" << lambda[k];
      EXPECT_LE(law_tail(law, lambda[k]), bound) << to_string(law);
    }
  }
}

TEST(Ensemble, ComplexEntriesUnitVariance) {
  const auto x = sample_matrix(spec_of(400, EntryLaw::gaussian, ScalarField::complex), 3).entries;
  EXPECT_NEAR(x.squaredNorm() / 400.0, 1.0, 0.02);
  EXPECT_GT(x.imag().norm(), 0.0);
}

TEST(Ensemble, ZeroEntry) {
  const auto x = sample_matrix(spec_of(20, EntryLaw::laplace), 9);
  const auto z = zero_entry(x, 3, 5);
  EXPECT_EQ(z.entries(3, 5), std::complex<double>(0.0));
  EXPECT_TRUE(z.spec.zeroed_entry.has_value());
  EXPECT_EQ(zero_entry(z, 3, 5).entries, z.entries);
  EXPECT_NEAR(x.entries.squaredNorm() - z.entries.squaredNorm(), std::norm(x.entries(3, 5)), 1e-14);
  auto d = x.entries;
  d(3, 5) = 0.0;
  EXPECT_EQ(d, z.entries);
  EXPECT_THROW(zero_entry(x, 20, 0), InvalidArgument);
}

TEST(Ensemble, ResampleRowTouchesOnlyThatRow) {
  const auto x = sample_matrix(spec_of(12, EntryLaw::gaussian), 4);
  const auto y = resample_row(x, 2, 1);
  for (Eigen::Index i = 0; i < 12; ++i) {
    if (i == 2) EXPECT_GT((x.entries.row(i) - y.entries.row(i)).norm(), 0.0);
    else EXPECT_EQ(x.entries.row(i), y.entries.row(i));
  }
  const auto c = resample_column(x, 4, 1);
  EXPECT_EQ(c.entries.leftCols(4), x.entries.leftCols(4));
}

TEST(Ensemble, DistinctDimensionsIndependent) {
  const auto a = sample_matrix(spec_of(4, EntryLaw::gaussian), 1).entries;
  const auto b = sample_matrix(spec_of(5, EntryLaw::gaussian), 1).entries;
  EXPECT_NE(a(0, 0) * 2.0, b(0, 0) * std::sqrt(5.0));
}

TEST(Ensemble, SpecTextRoundTrip) {
  EnsembleSpec s = spec_of(17, EntryLaw::uniform, ScalarField::complex);
  s.third_moment = ThirdMomentMode::vanishing;
  s.zeroed_entry = EntryIndex{1, 2};
  EXPECT_EQ(ensemble_spec_from_text(to_text(s)), s);
  EXPECT_THROW(ensemble_spec_from_text(R"({"dimension": 3, "entry_law": "gaussian", "colour": 1})"), ConfigError);
  EXPECT_THROW(entry_law_from_string("cauchy"), InvalidArgument);
}
