#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace glyphforge {

// Little-endian binary writer into a memory buffer, flushed to disk at the
// end so partially written files never appear on failure paths.
class ByteWriter {
public:
    void u8(std::uint8_t v);
    void u16(std::uint16_t v);
    void u32(std::uint32_t v);
    void u64(std::uint64_t v);
    void f32(float v);
    void bytes(const void* p, std::size_t n);
    void str(const std::string& s); // raw bytes, no length prefix

    std::size_t offset() const { return buf_.size(); }
    const std::vector<std::uint8_t>& buffer() const { return buf_; }
    void save(const std::filesystem::path& path) const;

private:
    std::vector<std::uint8_t> buf_;
};

// Reader over a whole file; throws ErrorKind::format with the byte offset
// on truncation.
class ByteReader {
public:
    explicit ByteReader(const std::filesystem::path& path);
    explicit ByteReader(std::vector<std::uint8_t> data);

    std::uint8_t u8();
    std::uint16_t u16();
    std::uint32_t u32();
    std::uint64_t u64();
    float f32();
    void bytes(void* dst, std::size_t n);
    std::string str(std::size_t n);

    std::size_t offset() const { return pos_; }
    std::size_t size() const { return data_.size(); }
    std::size_t remaining() const { return data_.size() - pos_; }
    bool at_end() const { return pos_ == data_.size(); }

private:
    void need(std::size_t n);
    std::vector<std::uint8_t> data_;
    std::size_t pos_ = 0;
};

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path, const std::vector<std::uint8_t>& data);
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

} // namespace glyphforge
