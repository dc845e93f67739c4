#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "llsfreq/error.hpp"
#include "llsfreq/signal.hpp"
#include "llsfreq/signal_io.hpp"

using namespace llsfreq;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const std::string& name) {
    const auto dir = fs::temp_directory_path() / "llsfreq_io_tests";
    fs::create_directories(dir);
    return dir / name;
}

SampledSignal sample_signal() {
    const auto tone = ToneParams::from_hz(1.3, 400e3, 0.9);
    return generate_noisy_tone_samples(tone, NoiseSpec{0.05}, 10e6, 777, 11, 0.125);
}

} // namespace

TEST(SignalIo, CsvRoundTripIsExact) {
    const auto s = sample_signal();
    std::stringstream buf;
    write_signal_csv(buf, s);
    EXPECT_EQ(buf.str().substr(0, 4), "t,y\n");
    const auto r = read_signal_csv(buf);
    ASSERT_EQ(r.size(), s.size());
    EXPECT_NEAR(r.sample_rate(), s.sample_rate(), 1e-6 * s.sample_rate());
    EXPECT_DOUBLE_EQ(r.start_time(), s.start_time());
    for (std::size_t i = 0; i < s.size(); ++i) EXPECT_EQ(r[i], s[i]);
}

TEST(SignalIo, RawRoundTripWithSidecar) {
    const auto s = sample_signal();
    const auto path = temp_file("roundtrip.f64");
    write_signal(path, s);
    EXPECT_TRUE(fs::exists(sidecar_path(path)));
    const auto r = read_signal(path);
    ASSERT_EQ(r.size(), s.size());
    EXPECT_EQ(r.sample_rate(), s.sample_rate());
    EXPECT_EQ(r.start_time(), s.start_time());
    for (std::size_t i = 0; i < s.size(); ++i) EXPECT_EQ(r[i], s[i]);
}

TEST(SignalIo, CsvPathDispatch) {
    const auto s = sample_signal();
    const auto path = temp_file("roundtrip.csv");
    write_signal(path, s);
    EXPECT_EQ(format_for_path(path), SignalFormat::csv);
    EXPECT_EQ(read_signal(path).size(), s.size());
}

TEST(SignalIo, RejectsNonUniformTime) {
    std::stringstream in("t,y\n0,1\n0.1,2\n0.25,3\n");
    try {
        read_signal_csv(in);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::parse_error);
    }
}

TEST(SignalIo, RejectsMissingHeaderAndBadNumbers) {
    std::stringstream a("0,1\n1,2\n");
    EXPECT_THROW(read_signal_csv(a), Error);
    std::stringstream b("t,y\n0,1\n1,abc\n");
    EXPECT_THROW(read_signal_csv(b), Error);
}

TEST(SignalIo, MissingSidecarIsAnIoError) {
    const auto path = temp_file("orphan.f64");
    {
        std::ofstream out(path, std::ios::binary);
        const double x = 1.0;
        out.write(reinterpret_cast<const char*>(&x), sizeof x);
    }
    fs::remove(sidecar_path(path));
    try {
        read_signal(path);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::io_error);
    }
}

TEST(SignalIo, TruncatedRawFileIsDetected) {
    const auto s = sample_signal();
    const auto path = temp_file("short.f64");
    write_signal(path, s);
    fs::resize_file(path, 8 * 10);
    EXPECT_THROW(read_signal(path), Error);
}
