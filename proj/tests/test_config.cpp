#include <cmath>
#include <cstdlib>
#include <string>

#include <gtest/gtest.h>

#include "anomalylab/config.hpp"
#include "anomalylab/io.hpp"

using namespace anomalylab;

TEST(Config, DefaultsRoundTrip)
{
    const ScenarioConfig c;
    const std::string a = dump_config(c);
    EXPECT_EQ(dump_config(parse_config(a)), a);
}

TEST(Config, NonDefaultValuesRoundTripExactly)
{
    ScenarioConfig c;
    c.model.delta_t = 0.1 + 0.2;   // not exactly representable in short decimal
    c.model.pert_channel = PauliChannel::Sigma3;
    c.model.pert_eps1 = 1.0 / 3.0;
    c.drive = DriveProtocol::periodic(1.36, 0.2, M_PI / 100);
    c.rho = {0.1, 1e-7};
    c.oracle = OracleMode::Pump;
    c.raman.species = Species::Custom;
    c.raman.custom_recoil_hz = 1234.5678;
    c.raman.convention = DepthConvention::Dimensionless;
    c.calib_species = {Species::Na23};
    c.out = "out.csv";
    const ScenarioConfig d = parse_config(dump_config(c));
    EXPECT_EQ(d.model.delta_t, c.model.delta_t);
    EXPECT_EQ(d.model.pert_eps1, c.model.pert_eps1);
    EXPECT_EQ(d.model.pert_channel, PauliChannel::Sigma3);
    EXPECT_EQ(d.drive.omega, c.drive.omega);
    EXPECT_EQ(d.rho, c.rho);
    EXPECT_EQ(d.oracle, OracleMode::Pump);
    EXPECT_EQ(d.raman.species, Species::Custom);
    EXPECT_EQ(d.raman.custom_recoil_hz, 1234.5678);
    EXPECT_EQ(d.raman.convention, DepthConvention::Dimensionless);
    EXPECT_EQ(d.calib_species.size(), 1u);
    EXPECT_EQ(d.out, "out.csv");
    EXPECT_EQ(dump_config(d), dump_config(c));
}

TEST(Config, PartialFileKeepsDefaults)
{
    const ScenarioConfig c = parse_config(R"({"delta_t": 0.0, "lambda0": 1.0})");
    EXPECT_EQ(c.model.delta_t, 0.0);
    EXPECT_EQ(c.drive.lambda0, 1.0);
    EXPECT_EQ(c.drive.amp, 0.2);
    EXPECT_EQ(c.grid, 400);
}

TEST(Config, Errors)
{
    EXPECT_THROW(parse_config("{not json"), ConfigError);
    EXPECT_THROW(parse_config("[1, 2]"), ConfigError);
    EXPECT_THROW(parse_config(R"({"lamda0": 1.0})"), ConfigError);
    EXPECT_THROW(parse_config(R"({"lambda0": "big"})"), ConfigError);
    EXPECT_THROW(parse_config(R"({"oracle": "magic"})"), ConfigError);
    EXPECT_THROW(load_config("/nonexistent/dir/config.json"), ConfigError);
    ScenarioConfig c;
    c.model.delta_t = 1.0;
    EXPECT_NO_THROW(c.validate());   // delta range is checked by the physics calls
    c.tau_max = -1.0;
    EXPECT_THROW(c.validate(), ConfigError);
    c = ScenarioConfig{};
    c.rho = {0.1, 0.0};
    EXPECT_THROW(c.validate(), ConfigError);
}

TEST(Csv, FormatAndSchema)
{
    CsvTable t(schema_name("drift"), {"tau", "x", "label"});
    t.add(0.1, 1.0 / 3.0, "a");
    t.add(2, -0.0, "b");
    t.add(NAN, INFINITY, "c");
    EXPECT_THROW(t.add(1.0, 2.0), IoError);
    const std::string s = t.str();
    EXPECT_EQ(s,
              "# schema: anomalylab/drift/v1\n"
              "tau,x,label\n"
              "0.10000000000000001,0.33333333333333331,a\n"
              "2,-0,b\n"
              "nan,inf,c\n");
    EXPECT_EQ(s.find('\r'), std::string::npos);
}

TEST(Csv, ParseRoundTrip)
{
    CsvTable t(schema_name("current"), {"tau", "J_total"});
    for (int i = 0; i < 5; ++i) t.add(0.1 * i, std::exp(-i) * 1e-3);
    const ParsedCsv p = parse_csv(t.str());
    EXPECT_EQ(p.schema, "anomalylab/current/v1");
    ASSERT_EQ(p.rows.size(), 5u);
    EXPECT_EQ(p.column("J_total"), 1);
    EXPECT_EQ(p.column("missing"), -1);
    for (int i = 0; i < 5; ++i) EXPECT_EQ(std::stod(p.rows[i][1]), std::exp(-i) * 1e-3);
}

TEST(Checksum, Crc32CheckValue)
{
    EXPECT_EQ(crc32("123456789"), 0xCBF43926u);
    EXPECT_EQ(crc32_hex("123456789"), "cbf43926");
    EXPECT_EQ(crc32(""), 0u);
}

TEST(Files, WriteReadAndFailures)
{
    const std::string path = ::testing::TempDir() + "anomalylab_io_test.csv";
    write_file(path, "a,b\n1,2\n");
    EXPECT_EQ(read_file(path), "a,b\n1,2\n");
    std::remove(path.c_str());
    EXPECT_THROW(write_file("/nonexistent/dir/x.csv", "x"), IoError);
    EXPECT_THROW(read_file("/nonexistent/dir/x.csv"), IoError);
}
