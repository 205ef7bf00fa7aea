#include "fogbench/pgm.hpp"

#include "fogbench/errors.hpp"
#include "fogbench/trace_csv.hpp"

#include <fstream>
#include <sstream>

namespace fogbench::io {

std::string to_pgm(const scene::FrameBuffer& frame) {
    const int shift = 16 - frame.bit_depth();
    std::string out = "P5\n# bit_depth " + std::to_string(frame.bit_depth()) + "\n" +
                      std::to_string(frame.width()) + " " + std::to_string(frame.height()) +
                      "\n65535\n";
    out.reserve(out.size() + static_cast<std::size_t>(frame.width()) * frame.height() * 2);
    for (int y = 0; y < frame.height(); ++y) {
        for (int x = 0; x < frame.width(); ++x) {
            const unsigned v = static_cast<unsigned>(frame.at(x, y)) << shift;
            out.push_back(static_cast<char>((v >> 8) & 0xFF)); // most significant byte first
            out.push_back(static_cast<char>(v & 0xFF));
        }
    }
    return out;
}

void write_pgm(const std::filesystem::path& path, const scene::FrameBuffer& frame) {
    write_file_atomic(path, to_pgm(frame));
}

namespace {

// Read one whitespace-delimited header token, skipping '#' comments, and
// report bit_depth if a "# bit_depth N" comment is seen.
std::string next_token(std::istringstream& in, int* bit_depth, const std::string& origin) {
    std::string token;
    while (true) {
        in >> std::ws;
        if (in.peek() == '#') {
            std::string comment;
            std::getline(in, comment);
            std::istringstream cs(comment.substr(1));
            std::string key;
            int value = 0;
            if (cs >> key >> value && key == "bit_depth") *bit_depth = value;
            continue;
        }
        if (!(in >> token)) throw io_error(origin + ": truncated pgm header");
        return token;
    }
}

} // namespace

scene::FrameBuffer parse_pgm(const std::string& data, const std::string& origin) {
    std::istringstream in(data);
    int bit_depth = 16;
    if (next_token(in, &bit_depth, origin) != "P5")
        throw io_error(origin + ": not a binary pgm (expected P5)");
    const int width = std::stoi(next_token(in, &bit_depth, origin));
    const int height = std::stoi(next_token(in, &bit_depth, origin));
    const int maxval = std::stoi(next_token(in, &bit_depth, origin));
    if (maxval != 65535)
        throw io_error(origin + ": expected 16-bit pgm (maxval 65535), got " +
                       std::to_string(maxval));
    in.get(); // single whitespace after maxval

    const std::size_t offset = static_cast<std::size_t>(in.tellg());
    const std::size_t need = static_cast<std::size_t>(width) * height * 2;
    if (data.size() - offset < need)
        throw io_error(origin + ": pgm pixel data truncated");

    scene::FrameBuffer frame(width, height, bit_depth);
    const int shift = 16 - bit_depth;
    const unsigned char* p = reinterpret_cast<const unsigned char*>(data.data()) + offset;
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            const unsigned v = (static_cast<unsigned>(p[0]) << 8) | p[1];
            frame.at(x, y) = static_cast<std::uint16_t>(v >> shift);
            p += 2;
        }
    }
    return frame;
}

scene::FrameBuffer read_pgm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open pgm: " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_pgm(buffer.str(), path.string());
}

} // namespace fogbench::io
