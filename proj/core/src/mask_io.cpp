#include "ding/mask_io.hpp"

#include <array>
#include <cctype>
#include <fstream>
#include <string>

#include "ding/error.hpp"
#include "ding/sample_io.hpp"

namespace ding {

namespace {

constexpr std::array<char, 4> kMaskMagic = {'D', 'M', 'S', 'K'};

std::ifstream open_binary(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in.is_open()) {
        fail(ErrorKind::Io, "cannot open " + path.string());
    }
    return in;
}

std::ofstream create_binary(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out.is_open()) {
        fail(ErrorKind::Io, "cannot open " + path.string() + " for writing");
    }
    return out;
}

// Next whitespace-delimited header token, skipping '#' comments.
std::string pgm_token(std::istream& in, const std::filesystem::path& path) {
    std::string token;
    int c = in.get();
    while (c != EOF) {
        if (c == '#') {
            while (c != EOF && c != '\n') {
                c = in.get();
            }
        } else if (std::isspace(c)) {
            if (!token.empty()) {
                return token;
            }
        } else {
            token.push_back(static_cast<char>(c));
        }
        c = in.get();
    }
    if (token.empty()) {
        fail(ErrorKind::Io, "truncated PGM header in " + path.string());
    }
    return token;
}

std::size_t pgm_number(std::istream& in, const std::filesystem::path& path) {
    const std::string token = pgm_token(in, path);
    try {
        std::size_t pos = 0;
        const unsigned long v = std::stoul(token, &pos);
        if (pos == token.size()) {
            return v;
        }
    } catch (const std::exception&) {
    }
    fail(ErrorKind::Io, "bad PGM header field '" + token + "' in " + path.string());
}

}  // namespace

BinaryVolume read_pgm(const std::filesystem::path& path) {
    std::ifstream in = open_binary(path);
    if (pgm_token(in, path) != "P5") {
        fail(ErrorKind::Io, path.string() + " is not a binary PGM (P5)");
    }
    const std::size_t width = pgm_number(in, path);
    const std::size_t height = pgm_number(in, path);
    const std::size_t maxval = pgm_number(in, path);
    if (width == 0 || height == 0 || maxval == 0 || maxval > 255) {
        fail(ErrorKind::Io, "unsupported PGM geometry or depth in " + path.string());
    }
    std::vector<unsigned char> raw(width * height);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (!in) {
        fail(ErrorKind::Io, "truncated PGM pixel data in " + path.string());
    }
    std::vector<std::uint8_t> bits(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
        bits[i] = raw[i] >= 128 ? 1 : 0;
    }
    return BinaryVolume({1, height, width}, std::move(bits));
}

BinaryVolume read_pgm_frames(const std::vector<std::filesystem::path>& paths) {
    require(!paths.empty(), ErrorKind::InvalidParameter, "no PGM frames given");
    std::vector<std::uint8_t> data;
    VolumeShape shape;
    for (const auto& path : paths) {
        const BinaryVolume frame = read_pgm(path);
        if (data.empty()) {
            shape = frame.shape();
        } else if (frame.shape().height != shape.height || frame.shape().width != shape.width) {
            fail(ErrorKind::Shape, "PGM frame " + path.string() + " has a different size");
        }
        data.insert(data.end(), frame.data().begin(), frame.data().end());
    }
    shape.frames = paths.size();
    return BinaryVolume(shape, std::move(data));
}

void write_pgm(const std::filesystem::path& path, const BinaryVolume& mask, std::size_t frame) {
    const VolumeShape s = mask.shape();
    require(frame < s.frames, ErrorKind::InvalidParameter, "frame index out of range");
    std::ofstream out = create_binary(path);
    out << "P5\n" << s.width << ' ' << s.height << "\n255\n";
    for (std::size_t y = 0; y < s.height; ++y) {
        for (std::size_t x = 0; x < s.width; ++x) {
            out.put(mask.at(frame, y, x) ? static_cast<char>(255) : static_cast<char>(0));
        }
    }
    if (!out) {
        fail(ErrorKind::Io, "failed to write " + path.string());
    }
}

BinaryVolume read_dmsk(const std::filesystem::path& path) {
    std::ifstream in = open_binary(path);
    std::array<char, 4> magic{};
    in.read(magic.data(), magic.size());
    if (!in || magic != kMaskMagic) {
        fail(ErrorKind::Io, path.string() + " is not a DMSK mask file");
    }
    VolumeShape shape;
    shape.frames = le::get_u32(in);
    shape.height = le::get_u32(in);
    shape.width = le::get_u32(in);
    std::vector<std::uint8_t> data(shape.size());
    in.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(data.size()));
    if (!in) {
        fail(ErrorKind::Io, "truncated DMSK data in " + path.string());
    }
    for (std::uint8_t v : data) {
        if (v > 1) {
            fail(ErrorKind::Io, "DMSK entries must be 0 or 1 in " + path.string());
        }
    }
    return BinaryVolume(shape, std::move(data));
}

void write_dmsk(const std::filesystem::path& path, const BinaryVolume& mask) {
    std::ofstream out = create_binary(path);
    out.write(kMaskMagic.data(), kMaskMagic.size());
    le::put_u32(out, static_cast<std::uint32_t>(mask.shape().frames));
    le::put_u32(out, static_cast<std::uint32_t>(mask.shape().height));
    le::put_u32(out, static_cast<std::uint32_t>(mask.shape().width));
    out.write(reinterpret_cast<const char*>(mask.data().data()),
              static_cast<std::streamsize>(mask.data().size()));
    if (!out) {
        fail(ErrorKind::Io, "failed to write " + path.string());
    }
}

}  // namespace ding
