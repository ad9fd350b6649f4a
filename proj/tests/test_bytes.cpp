#include "doctest.h"

#include <cstdio>
#include <filesystem>

#include "glyphforge/bytes.hpp"
#include "glyphforge/error.hpp"

using namespace glyphforge;

namespace {

std::filesystem::path temp_file(const char* name) {
    return std::filesystem::temp_directory_path() / name;
}

} // namespace

TEST_CASE("writer emits little-endian layouts") {
    ByteWriter w;
    w.u8(0xab);
    w.u16(0x1234);
    w.u32(0xdeadbeef);
    w.u64(0x0102030405060708ull);
    const auto& b = w.buffer();
    REQUIRE(b.size() == 15);
    CHECK(b[0] == 0xab);
    CHECK(b[1] == 0x34);
    CHECK(b[2] == 0x12);
    CHECK(b[3] == 0xef);
    CHECK(b[4] == 0xbe);
    CHECK(b[5] == 0xad);
    CHECK(b[6] == 0xde);
    CHECK(b[7] == 0x08);
    CHECK(b[14] == 0x01);
}

TEST_CASE("reader round trips all scalar types") {
    ByteWriter w;
    w.u8(7);
    w.u16(65535);
    w.u32(0);
    w.u64(1ull << 63);
    w.f32(3.25f);
    w.str("hi");
    ByteReader r(w.buffer());
    CHECK(r.u8() == 7);
    CHECK(r.u16() == 65535);
    CHECK(r.u32() == 0);
    CHECK(r.u64() == (1ull << 63));
    CHECK(r.f32() == 3.25f);
    CHECK(r.str(2) == "hi");
    CHECK(r.at_end());
}

TEST_CASE("reader reports truncation with the failing offset") {
    ByteWriter w;
    w.u16(99);
    ByteReader r(w.buffer());
    r.u8();
    try {
        r.u32();
        FAIL("expected format error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::format);
    }
}

TEST_CASE("file round trips for binary and text") {
    auto p = temp_file("glyphforge_bytes_test.bin");
    std::vector<std::uint8_t> payload = {0, 1, 2, 255, 128};
    write_file_bytes(p, payload);
    CHECK(read_file_bytes(p) == payload);

    auto t = temp_file("glyphforge_bytes_test.txt");
    write_text_file(t, "line1\nline2\n");
    CHECK(read_text_file(t) == "line1\nline2\n");
    std::filesystem::remove(p);
    std::filesystem::remove(t);
}

TEST_CASE("reading a missing file raises an io error") {
    CHECK_THROWS_AS(read_file_bytes("/nonexistent/glyphforge/nope.bin"), Error);
}
