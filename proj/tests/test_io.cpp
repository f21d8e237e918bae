#include <functional>
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "adcons/error.hpp"
#include "adcons/keymatrix.hpp"
#include "adcons/scenario.hpp"
#include "fixtures.hpp"

using namespace adcons;
namespace fs = std::filesystem;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("no error raised");
    return ErrorKind::Input;
}

fs::path scratch_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("adcons_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

void write(const fs::path& p, const std::string& text) {
    std::ofstream(p) << text;
}

}  // namespace

TEST_CASE("key-matrix parse and format") {
    const auto doc = parse_keymatrix("# gains\nK 1 2\n-0.8543 -2.5628\nS 2 2 0.5853 -0.5853\n-0.5853\n1.7559\nE 0 0\n");
    REQUIRE(doc.entries.size() == 3);
    CHECK(doc.get("K") == Matrix{{-0.8543, -2.5628}});
    CHECK(doc.get("S") == Matrix{{0.5853, -0.5853}, {-0.5853, 1.7559}});
    CHECK(doc.get("E").empty());
    CHECK(parse_keymatrix(format_keymatrix(doc)).entries == doc.entries);

    CHECK(kind_of([] { (void)parse_keymatrix("K 1 2\n1\n"); }) == ErrorKind::Parse);
    CHECK(kind_of([] { (void)parse_keymatrix("K 1 1\nabc\n"); }) == ErrorKind::Parse);
    CHECK(kind_of([] { (void)parse_keymatrix("K 1 1\n1 2\n"); }) == ErrorKind::Parse);
    CHECK(kind_of([] { (void)parse_keymatrix("K 1 1\n1\nK 1 1\n2\n"); }) == ErrorKind::Parse);
    CHECK(kind_of([] { (void)parse_keymatrix("K x 1\n1\n"); }) == ErrorKind::Parse);
    CHECK(kind_of([] { (void)parse_keymatrix("K 1 1\nnan\n"); }) == ErrorKind::Parse);
    CHECK(kind_of([] { (void)parse_keymatrix("").get("A"); }) == ErrorKind::Input);
}

TEST_CASE("gain sets survive serialization bit for bit") {
    std::mt19937_64 rng(113);
    const AgentModel m(random_matrix(rng, 3, 3), random_matrix(rng, 3, 2), random_matrix(rng, 2, 3));
    DesignOptions o;
    o.beta_override = 1.0 / 3.0;
    o.kappa = 0.1 / 7.0;
    const GainSet g = design_all(m, LeaderSpec{ZeroLeader{}}, 4, o);
    const GainSet back = gains_from_doc(parse_keymatrix(format_keymatrix(gains_to_doc(g))));
    CHECK(*back.K == *g.K);
    CHECK(*back.F == *g.F);
    CHECK(*back.S == *g.S);
    CHECK(*back.P == *g.P);
    CHECK(*back.Pbar == *g.Pbar);
    CHECK(*back.Omega == *g.Omega);
    CHECK(*back.Q == *g.Q);
    CHECK(*back.beta == *g.beta);
    CHECK(back.kappa == g.kappa);
    CHECK(back.phi == g.phi);
    CHECK(kind_of([] { (void)gains_from_doc(parse_keymatrix("Z 1 1\n1\n")); }) == ErrorKind::Parse);
}

TEST_CASE("leader directives") {
    CHECK(std::holds_alternative<ZeroLeader>(parse_leader("zero").variant));
    const auto c = parse_leader("chua a=9 b=18 m01=-0.75 m02=-1.3333333333333333");
    REQUIRE(std::holds_alternative<ChuaParams>(c.variant));
    CHECK(std::get<ChuaParams>(c.variant).m02 == doctest::Approx(-4.0 / 3.0));
    const auto s = parse_leader("sinusoid amplitude=1,2 frequency=1,0.5");
    REQUIRE(std::holds_alternative<SinusoidParams>(s.variant));
    CHECK(std::get<SinusoidParams>(s.variant).phase == std::vector<double>{0.0, 0.0});
    for (const auto& spec : {c, s}) CHECK(format_leader(parse_leader(format_leader(spec))) == format_leader(spec));
    CHECK(kind_of([] { (void)parse_leader("chaos"); }) == ErrorKind::Parse);
    CHECK(kind_of([] { (void)parse_leader("chua q=1"); }) == ErrorKind::Parse);
    CHECK(kind_of([] { (void)parse_leader("zero a=1"); }) == ErrorKind::Parse);
}

TEST_CASE("model files") {
    const auto mf = model_from_doc(parse_keymatrix("leader zero\nA 1 1\n0\nB 1 1\n1\nC 1 1\n1\n"));
    CHECK(mf.model.A == Matrix{{0.0}});
    REQUIRE(mf.leader);
    CHECK(mf.leader->name() == "zero");
    CHECK(kind_of([] { (void)model_from_doc(parse_keymatrix("A 1 1\n0\nB 1 1\n1\n")); }) == ErrorKind::Input);
    CHECK(kind_of([] { (void)model_from_doc(parse_keymatrix("A 1 1\n0\nB 1 1\n1\nC 1 1\n1\nD 1 1\n0\n")); }) ==
          ErrorKind::Parse);
    const auto doc = model_to_doc(double_integrator(), LeaderSpec{ChuaParams{}});
    CHECK(model_from_doc(parse_keymatrix(format_keymatrix(doc))).model.A == double_integrator().A);
}

TEST_CASE("inline matrices and ini parsing") {
    CHECK(parse_inline_matrix("1 2; 3 4", "m") == Matrix{{1, 2}, {3, 4}});
    CHECK(kind_of([] { (void)parse_inline_matrix("1 2; 3", "m"); }) == ErrorKind::Parse);
    const auto ini = parse_ini("# c\n[sim]\ndt = 0.5 # step\n[protocol]\nkind=leaderless-c\n");
    CHECK(*ini.get("sim", "dt") == "0.5");
    CHECK(*ini.get("protocol", "kind") == "leaderless-c");
    CHECK_FALSE(ini.get("sim", "t_end"));
    CHECK(kind_of([] { (void)parse_ini("dt = 1\n"); }) == ErrorKind::Parse);
    CHECK(kind_of([] { (void)parse_ini("[nope]\n"); }) == ErrorKind::Parse);
    CHECK(kind_of([] { (void)parse_ini("[sim]\nbogus = 1\n"); }) == ErrorKind::Parse);
    CHECK(kind_of([] { (void)parse_ini("[sim]\ndt = 1\ndt = 2\n"); }) == ErrorKind::Parse);
}

TEST_CASE("scenario resolution") {
    const fs::path dir = scratch_dir("scenario");
    write(dir / "m.model", format_keymatrix(model_to_doc(double_integrator())));
    write(dir / "g.graph", format_graph(ring6()));
    write(dir / "lg.graph", format_graph(leader5()));
    write(dir / "s.gains", "S 2 2\n0.5853 -0.5853\n-0.5853 1.7559\n");
    write(dir / "a.scenario",
          "[model]\nfile = m.model\n[graph]\nfile = g.graph\n[protocol]\nkind = leaderless-c\n"
          "[gains]\nfile = s.gains\nK = -0.8543 -2.5628\n[sim]\ndt = 0.01\nt_end = 2\nseed = 9\n[output]\ndir = out\n");
    ScenarioOverrides ov;
    ov.t_end = 1.0;
    const Scenario s = load_scenario(dir / "a.scenario", ov);
    CHECK(s.name == "a");
    CHECK(s.sim.dt == 0.01);
    CHECK(s.sim.t_end == 1.0);
    CHECK(s.sim.seed == 9);
    CHECK(s.out_dir == dir / "out");
    CHECK(*s.gains.K == Matrix{{-0.8543, -2.5628}});
    CHECK((*s.gains.F)(0, 0) == doctest::Approx(-2.5628).epsilon(1e-3));
    CHECK((*s.gains.F)(1, 0) == doctest::Approx(-0.8543).epsilon(1e-3));
    CHECK(std::find(s.overridden.begin(), s.overridden.end(), "S") != s.overridden.end());
    const auto dyn = make_dynamics(s);
    CHECK(dyn.followers() == 6);

    write(dir / "bad.scenario", "[model]\nfile = m.model\n[graph]\nfile = g.graph\n[protocol]\nkind = lf-continuous\n");
    CHECK(kind_of([&] { (void)load_scenario(dir / "bad.scenario"); }) == ErrorKind::Configuration);
    write(dir / "missing.scenario", "[model]\nfile = nope.model\n[graph]\nfile = g.graph\n[protocol]\nkind = leaderless-c\n");
    CHECK(kind_of([&] { (void)load_scenario(dir / "missing.scenario"); }) == ErrorKind::Input);
    write(dir / "k.scenario",
          "[model]\nfile = m.model\n[graph]\nfile = lg.graph\n[protocol]\nkind = lf-continuous\n[leader]\nspec = zero\n"
          "[gains]\nkappa = 0.1, 0.2\n");
    CHECK(kind_of([&] { (void)load_scenario(dir / "k.scenario"); }) == ErrorKind::Configuration);
    write(dir / "m.scenario",
          "[model]\nfile = m.model\n[graph]\nfile = lg.graph\n[protocol]\nkind = lf-continuous\n[leader]\nspec = zero\n"
          "[gains]\nkappa = 0.1, 0.2, 0.3, 0.4, 0.5\n[sim]\ninitial = manifold\n");
    const Scenario ms = load_scenario(dir / "m.scenario");
    CHECK(ms.gains.kappa == std::vector<double>{0.1, 0.2, 0.3, 0.4, 0.5});
    const auto mdyn = make_dynamics(ms);
    CHECK(mdyn.derive(initial_state(ms, mdyn)).xi_norm() == 0.0);
    fs::remove_all(dir);
}
