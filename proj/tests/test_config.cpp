#include <sstream>
#include <string>

#include "doctest.h"
#include "polariton/config.hpp"
#include "polariton/errors.hpp"

using namespace polariton;
using doctest::Approx;

namespace {

RunConfig parse_text(const std::string& text) {
    std::istringstream in(text);
    return RunConfig::parse(in, "test.cfg");
}

std::string error_of(const std::string& text) {
    try {
        parse_text(text);
    } catch (const ValidationError& e) {
        return e.what();
    }
    return {};
}

const char* kBasic = R"(
# comment line
[coupling]
e_x  = 1.22   # trailing comment
rabi = 0.50

[cavity]
e0    = 1.0
n_eff = 1.5
)";

}  // namespace

TEST_CASE("parsing sections and keys") {
    const auto cfg = parse_text(kBasic);
    CHECK(cfg.has("coupling.e_x"));
    CHECK(cfg.has_section("cavity"));
    CHECK_FALSE(cfg.has_section("film"));
    CHECK(cfg.number("coupling.rabi") == 0.5);
    CHECK(cfg.number_or("material.m_ex", 25.0) == 25.0);
    CHECK(cfg.coupling().e_x == 1.22);
    CHECK(cfg.cavity(ModelKind::FullHopfield).n_eff == 1.5);
    CHECK(cfg.model() == ModelKind::FullHopfield);
    CHECK(cfg.entries().at("coupling.rabi").line == 5);
}

TEST_CASE("errors carry the location") {
    CHECK(error_of("[coupling]\ne_x = 1.22\nbogus = 3\n").find("test.cfg:3") != std::string::npos);
    CHECK(error_of("[coupling]\ne_x = 1.22\nbogus = 3\n").find("coupling.bogus") != std::string::npos);
    CHECK(error_of("[coupling]\ne_x = 1.22\ne_x = 1.3\n").find("duplicate") != std::string::npos);
    CHECK(error_of("[coupling]\ne_x = abc\n").find("test.cfg:2") != std::string::npos);
    CHECK(error_of("[coupling\n").find("section") != std::string::npos);
    CHECK(error_of("[coupling]\njust text\n").find("key = value") != std::string::npos);
    CHECK(error_of("e_x = 1\n").find("unknown key") != std::string::npos);
}

TEST_CASE("physical invariants are enforced at load time") {
    CHECK_THROWS_AS(parse_text("[coupling]\ne_x = 1.22\nrabi = 3.0\n"), ValidationError);
    CHECK(error_of("[coupling]\ne_x = 1.22\nrabi = 3.0\n").find("coupling.rabi") != std::string::npos);
    CHECK_THROWS_AS(parse_text(std::string(kBasic) + "[material]\nm_ex = -1\n"), ValidationError);
    CHECK_THROWS_AS(parse_text("[coupling]\ne_x = 1.22\nrabi = 0.5\n[cavity]\ne0 = 1\nlp0 = 1\nn_eff = 1.5\n"),
                    ValidationError);
    CHECK_THROWS_AS(parse_text("[coupling]\ne_x = 1.22\nrabi = 0.5\n[cavity]\ne0 = 1\nn_eff = 0.5\n"),
                    ValidationError);
    CHECK_THROWS_AS(parse_text("[grid]\ntheta_max = 95\n"), ValidationError);
    CHECK_THROWS_AS(parse_text("[fit]\nmodel = cubic\n"), ValidationError);
    CHECK_THROWS_AS(parse_text("[fit]\nfree = rabi, colour\n"), ValidationError);
    CHECK_THROWS_AS(parse_text("[fit]\nbounds_rabi = 0.5, 0.1\n"), ValidationError);
    CHECK_THROWS_AS(parse_text("[fit]\nrestarts = 2.5\n"), ValidationError);
    CHECK_THROWS_AS(parse_text("[film]\nthickness_nm = 100\n"), ValidationError);
    CHECK_THROWS_AS(parse_text("[peaks]\nwindow_min = 2\nwindow_max = 1\n"), ValidationError);
}

TEST_CASE("lower-branch target solves the cavity energy") {
    const auto cfg = parse_text("[coupling]\ne_x = 1.22\nrabi = 0.5\n[cavity]\nlp0 = 1.02\nn_eff = 1.5\n");
    for (auto kind : {ModelKind::Quadratic, ModelKind::FullHopfield}) {
        const auto m = cfg.cavity(kind);
        CHECK(branch_energies(m.e0, cfg.coupling(), kind).lp == Approx(1.02).epsilon(1e-12));
    }
}

TEST_CASE("fit section") {
    const auto cfg = parse_text(
        "[fit]\nmodel = quadratic\nfree = rabi, e0\nbounds_rabi = 0.1, 0.9\nrestarts = 3\nseed = 42\n");
    const auto fc = cfg.fit_config();
    CHECK(fc.model == ModelKind::Quadratic);
    CHECK(fc.free == std::array<bool, 4>{false, true, true, false});
    CHECK(fc.bounds[1].lo == 0.1);
    CHECK(fc.bounds[1].hi == 0.9);
    CHECK(fc.restarts == 3);
    CHECK(fc.seed == 42);
}

TEST_CASE("film and stack") {
    const auto cfg = parse_text(
        "[film]\nalpha_target = 1.05e5\nthickness_nm = 280\nstrength_scale = 4\n"
        "[stack]\nlayers = index:0.2:3.0:22, film, index:0.2:3.0:22\n");
    const auto film = cfg.film();
    CHECK(film.thickness_nm == 280.0);
    CHECK(film.model.oscillators.at(0).f == Approx(4.0 * film.strength_unscaled).epsilon(1e-15));
    CHECK(film.model.eps_inf == 2.5);
    CHECK(cfg.stack().layers().size() == 5);
    CHECK(cfg.peak_settings().split_hint == 1.22);

    CHECK_THROWS_AS(parse_text("[film]\nthickness_nm = 280\nstrength = 0.5\n[stack]\nlayers = film, glass\n"),
                    ValidationError);
    CHECK_THROWS_AS(parse_text("[film]\nthickness_nm = 280\nstrength = 0.5\n[stack]\nlayers = index:1:0\n"),
                    ValidationError);
    CHECK_THROWS_AS(
        parse_text("[film]\nthickness_nm = 280\nstrength = 0.5\nalpha_target = 1e5\n[stack]\nlayers = film\n"),
        ValidationError);
}

TEST_CASE("shipped configs load") {
    const auto cav = RunConfig::load(POLARITON_CONFIG_DIR "/cavity.cfg");
    CHECK(cav.stack().layers().size() == 5);
    CHECK(cav.angle_grid().size() == 13);
    CHECK(cav.energy_grid().size() == 1601);
    const auto op = RunConfig::load(POLARITON_CONFIG_DIR "/operating_point.cfg");
    CHECK(op.material().m_ph_override.value() == 1e-4);
    CHECK(op.target_charge_to_mass().value() == 2400.0);
    CHECK_THROWS_AS(RunConfig::load(POLARITON_CONFIG_DIR "/does_not_exist.cfg"), ValidationError);
}

TEST_CASE("overrides") {
    auto cfg = parse_text(kBasic);
    cfg.set("coupling.rabi", "0.3");
    CHECK(cfg.coupling().rabi == 0.3);
    CHECK_THROWS_AS(cfg.set("coupling.nope", "1"), ValidationError);
    CHECK_THROWS_AS(cfg.set("coupling.rabi", "x"), ValidationError);
    cfg.set("coupling.rabi", "5");
    CHECK_THROWS_AS(cfg.validate_sections(), ValidationError);
}

TEST_CASE("config hash") {
    const auto base = parse_text(kBasic);
    CHECK(base.hash_hex().size() == 16);
    CHECK(base.hash() == parse_text(kBasic).hash());

    SUBCASE("formatting, comments, ordering and io paths do not matter") {
        const auto same = parse_text(
            "[cavity]\nn_eff=1.50\ne0 = 1.000 # moved\n\n[coupling]\nrabi = 5e-1\ne_x = 1.22\n[io]\nreport = x.json\n");
        CHECK(same.hash() == base.hash());
    }
    SUBCASE("any semantic change does") {
        auto changed = base;
        changed.set("coupling.rabi", "0.51");
        CHECK(changed.hash() != base.hash());
        auto added = base;
        added.set("material.m_ex", "25");
        CHECK(added.hash() != base.hash());
        auto model = base;
        model.set("fit.model", "quadratic");
        CHECK(model.hash() != base.hash());
    }
    SUBCASE("list values are whitespace-normalised") {
        CHECK(parse_text("[fit]\nfree = rabi,e0\n").hash() == parse_text("[fit]\nfree =  rabi ,  e0\n").hash());
        CHECK(parse_text("[fit]\nfree = rabi,e0\n").hash() != parse_text("[fit]\nfree = e0,n_eff\n").hash());
    }
}

TEST_CASE("model and polarization names") {
    CHECK(parse_model("quadratic") == ModelKind::Quadratic);
    CHECK(parse_model("hopfield") == ModelKind::FullHopfield);
    CHECK_THROWS_AS(parse_model("Hopfield"), ValidationError);
    CHECK(to_string(parse_model("quadratic")) == "quadratic");
    CHECK(parse_polarization("tm") == Polarization::TM);
    CHECK(to_string(Polarization::TE) == "te");
    CHECK_THROWS_AS(parse_polarization("s"), ValidationError);
}
