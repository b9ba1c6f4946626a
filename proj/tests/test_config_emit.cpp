#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "cavityspec/config.hpp"
#include "cavityspec/emit.hpp"
#include "json.hpp"

using namespace cavityspec;

TEST(Config, ParsesSectionsAndComments) {
    const auto e = config::parse(
        "# leading comment\n"
        "top = 1\n"
        "[params]\n"
        "nU = 0.05   ; trailing\n"
        "  beta=1710\n"
        "\n"
        "[ observe ]\n"
        "values = 0.1, 0.2,0.3\n");
    EXPECT_EQ(e.at("top"), "1");
    EXPECT_EQ(e.at("params.nU"), "0.05");
    EXPECT_EQ(e.at("params.beta"), "1710");
    EXPECT_EQ(config::to_list("observe.values", e.at("observe.values")),
              (std::vector<double>{0.1, 0.2, 0.3}));
}

TEST(Config, RejectsMalformedInput) {
    EXPECT_THROW(config::parse("[params\nnU = 1\n"), ValidationError);
    EXPECT_THROW(config::parse("nU 1\n"), ValidationError);
    EXPECT_THROW(config::parse("[a]\nx = 1\nx = 2\n"), ValidationError);
    EXPECT_THROW(config::parse("= 3\n"), ValidationError);
    try {
        config::parse("[a]\nx = 1\nx = 2\n", "my.conf");
    } catch (const ValidationError& e) {
        EXPECT_NE(std::string(e.what()).find("my.conf:3"), std::string::npos);
    }
}

TEST(Config, OverlayRejectsUnknownKeys) {
    auto base = config::params_schema();
    config::overlay(base, {{"params.nU", "0.2"}});
    EXPECT_EQ(base.at("params.nU"), "0.2");
    EXPECT_THROW(config::overlay(base, {{"params.nu", "0.2"}}), ValidationError);
    EXPECT_THROW(config::parse_override("params.nU"), ValidationError);
    EXPECT_EQ(config::parse_override(" params.nU = 3 ").second, "3");
}

TEST(Config, TypedAccess) {
    EXPECT_EQ(config::to_double("k", "inf"), std::numeric_limits<double>::infinity());
    EXPECT_EQ(config::to_double("k", "1e-3"), 1e-3);
    EXPECT_THROW(config::to_double("k", "1e-3x"), ValidationError);
    EXPECT_THROW(config::to_long("k", "1.5"), ValidationError);
    EXPECT_TRUE(config::to_bool("k", "on"));
    EXPECT_FALSE(config::to_bool("k", "false"));
    EXPECT_THROW(config::to_bool("k", "maybe"), ValidationError);
    EXPECT_EQ(config::to_strings(" C, AC ,,A"), (std::vector<std::string>{"C", "AC", "A"}));
}

TEST(Config, DefaultsReproduceFig1Params) {
    const auto p = config::to_params(config::params_schema());
    const PhysicalParams ref;
    EXPECT_EQ(p.nU, ref.nU);
    EXPECT_EQ(p.omega_bar_P, ref.omega_bar_P);
    EXPECT_EQ(p.N_C, ref.N_C);
    EXPECT_EQ(p.beta, ref.beta);
    EXPECT_EQ(p.atom_mass_kg, ref.atom_mass_kg);
    EXPECT_EQ(p.ir_cutoff.kind, IrCutoff::Kind::Cell);
    EXPECT_EQ(config::parse_ir_cutoff("none").kind, IrCutoff::Kind::None);
    EXPECT_EQ(config::parse_ir_cutoff("1e-3").value, 1e-3);
}

TEST(Config, NumberFormatRoundTrips) {
    for (double x : {0.1, 1.0 / 3.0, 2.0876, 1e-300, -7.25e12}) {
        EXPECT_EQ(config::to_double("k", config::format_number(x)), x);
    }
    EXPECT_EQ(config::format_number(std::numeric_limits<double>::quiet_NaN()), "nan");
    EXPECT_EQ(config::format_number(-std::numeric_limits<double>::infinity()), "-inf");
}

namespace {

emit::Table sample() {
    emit::Table t;
    t.name = "sample";
    t.manifest = {{"params.nU", "0.1"}, {"tool.version", emit::tool_version}};
    t.columns = {"x", "label", "y"};
    t.add({0.5, std::string("ok"), 1.0 / 3.0});
    t.add({1.0, std::string("a,b"), std::numeric_limits<double>::quiet_NaN()});
    return t;
}

}  // namespace

TEST(Emit, CsvLayout) {
    std::ostringstream os;
    emit::write_csv(os, sample());
    EXPECT_EQ(os.str(),
              "# params.nU = 0.1\n"
              "# tool.version = 1.0.0\n"
              "x,label,y\n"
              "0.5,ok,0.33333333333333331\n"
              "1,\"a,b\",nan\n");
}

TEST(Emit, EmptyTableIsHeaderOnly) {
    emit::Table t;
    t.name = "empty";
    t.columns = {"a", "b"};
    std::ostringstream os;
    emit::write_csv(os, t);
    EXPECT_EQ(os.str(), "a,b\n");
    EXPECT_THROW(t.add({1.0}), std::logic_error);
}

TEST(Emit, JsonMirrorsCsv) {
    std::ostringstream os;
    emit::write_json(os, sample());
    const auto j = nlohmann::json::parse(os.str());
    EXPECT_EQ(j["manifest"]["params.nU"], "0.1");
    EXPECT_EQ(j["columns"][1], "label");
    EXPECT_EQ(j["rows"][0][2].get<double>(), 1.0 / 3.0);
    EXPECT_EQ(j["rows"][1][2], "nan");
    EXPECT_EQ(j["rows"][1][1], "a,b");
}

TEST(Emit, FilesAreDeterministicAndManifestReadsBack) {
    const auto dir = std::filesystem::temp_directory_path() / "cavityspec_emit_test";
    std::filesystem::remove_all(dir);
    for (auto fmt : {emit::Format::Csv, emit::Format::Json}) {
        const auto a = emit::write_file(dir / "a", sample(), fmt);
        const auto b = emit::write_file(dir / "b", sample(), fmt);
        std::ifstream fa(a, std::ios::binary), fb(b, std::ios::binary);
        std::stringstream sa, sb;
        sa << fa.rdbuf();
        sb << fb.rdbuf();
        EXPECT_EQ(sa.str(), sb.str());
        EXPECT_EQ(emit::read_manifest(a), sample().manifest);
    }
    std::filesystem::remove_all(dir);
}
