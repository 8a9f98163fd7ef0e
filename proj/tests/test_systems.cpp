#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <random>

#include "kcontract/matrix_io.hpp"
#include "kcontract/systems.hpp"

using namespace kcontract;

namespace {

Matrix fd_jacobian(const SystemModel& s, const Vector& x) {
  const double h = 1e-6;
  Matrix j(s.dim, s.dim);
  for (int c = 0; c < s.dim; ++c) {
    Vector xp = x, xm = x;
    xp(c) += h;
    xm(c) -= h;
    j.col(c) = (s.field(0.0, xp) - s.field(0.0, xm)) / (2 * h);
  }
  return j;
}

std::vector<SystemModel> all_builtins() {
  std::vector<SystemModel> out;
  for (const auto& name : builtin_names()) {
    nlohmann::json p = nlohmann::json::object();
    if (name == "linear") p = {{"A", {{-1.0, 2.0}, {0.5, -3.0}}}};
    if (name == "skew_linear") {
      p = {{"J11", {{-2.0, 0.0}, {0.0, -2.0}}}, {"J22", {{-3.0}}}, {"J12", {{1.0}, {2.0}}}, {"c", 4.0}};
    }
    out.push_back(make_builtin(name, p));
  }
  return out;
}

}  // namespace

TEST(Systems, InitialConditionsMatchFixture) {
  std::ifstream in(KC_FIXTURE_DIR "/thomas_initial_conditions.csv");
  ASSERT_TRUE(in.good());
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "x1,x2,x3");
  const Matrix m = read_matrix_csv(in);
  const auto ics = thomas_initial_conditions();
  ASSERT_EQ(static_cast<std::size_t>(m.rows()), ics.size());
  for (std::size_t i = 0; i < ics.size(); ++i) EXPECT_EQ(Vector(m.row(i).transpose()), ics[i]) << i;
}

TEST(Systems, JacobiansMatchFiniteDifferences) {
  std::mt19937 rng(71);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (const auto& s : all_builtins()) {
    for (int trial = 0; trial < 20; ++trial) {
      Vector x(s.dim);
      for (int i = 0; i < s.dim; ++i) x(i) = u(rng);
      const Matrix j = s.jacobian(0.0, x);
      EXPECT_LT((j - fd_jacobian(s, x)).cwiseAbs().maxCoeff(), 1e-7) << s.name;
    }
  }
}

TEST(Systems, EntryBoundsContainJacobianOnBox) {
  std::mt19937 rng(72);
  for (const auto& s : all_builtins()) {
    if (!s.entry_bounds || !s.box) continue;
    for (int trial = 0; trial < 200; ++trial) {
      Vector x(s.dim);
      for (int i = 0; i < s.dim; ++i) {
        x(i) = std::uniform_real_distribution<double>(s.box->lower(i), s.box->upper(i))(rng);
      }
      const Matrix j = s.jacobian(0.0, x);
      EXPECT_TRUE((j.array() >= s.entry_bounds->lo.array() - 1e-15).all()) << s.name;
      EXPECT_TRUE((j.array() <= s.entry_bounds->hi.array() + 1e-15).all()) << s.name;
    }
  }
}

TEST(Systems, ThomasFields) {
  const auto s = thomas();
  const Vector x{{0.3, -0.2, 0.7}};
  const Vector f = s.field(0.0, x);
  EXPECT_DOUBLE_EQ(f(0), std::sin(-0.2) - kThomasD * 0.3);
  EXPECT_DOUBLE_EQ(f(1), std::sin(0.7) + kThomasD * 0.2);
  EXPECT_DOUBLE_EQ(f(2), std::sin(0.3) - kThomasD * 0.7);

  const auto p = thomas_perturbed();
  EXPECT_EQ(p.dim, 4);
  const Vector y{{0.3, -0.2, 0.7, 1.0}};
  const Vector g = p.field(0.0, y);
  EXPECT_NEAR(g(3), -0.1, 1e-15);
  EXPECT_THROW(thomas_perturbed(kThomasD, 1.1 - 2 * kThomasD, 0.1), DomainError);
}

TEST(Systems, SplitPoints) {
  EXPECT_EQ(builtin_split("lti_series", nlohmann::json::object()), 2);
  EXPECT_EQ(builtin_split("remark2", nlohmann::json::object()), 1);
  nlohmann::json sk = {{"J11", {{-2.0, 0.0}, {0.0, -2.0}}}, {"J22", {{-3.0}}}, {"J12", {{1.0}, {2.0}}}, {"c", 4.0}};
  EXPECT_EQ(builtin_split("skew_linear", sk), 2);
}

TEST(Systems, RejectsUnknownNamesAndKeys) {
  EXPECT_THROW(make_builtin("lorenz", nlohmann::json::object()), ParseError);
  EXPECT_THROW(make_builtin("thomas", {{"dd", 0.2}}), ParseError);
  EXPECT_THROW(make_builtin("thomas", {{"d", "0.2"}}), ParseError);
  EXPECT_THROW(make_builtin("linear", nlohmann::json::object()), ParseError);
  EXPECT_THROW(make_builtin("linear", {{"A", {{1.0, 2.0}, {3.0}}}}), ParseError);
}

TEST(Systems, MatrixParamForms) {
  const Matrix a = matrix_param(nlohmann::json{{1.0, 2.0}, {3.0, 4.0}}, "A");
  const Matrix b = matrix_param(nlohmann::json{{"rows", 2}, {"cols", 2}, {"entries", {1.0, 2.0, 3.0, 4.0}}}, "A");
  EXPECT_EQ(a, b);
  EXPECT_EQ(a(0, 1), 2.0);
}
